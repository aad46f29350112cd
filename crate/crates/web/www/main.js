import init, { cluster, lambda_scan, sample_edges, sample_truth } from "./pkg/mosc_web.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#d1495b", "#00798c", "#edae49", "#66a182", "#2e4057", "#8d96a3"];
let layout = null;

function forceLayout(n, edges, width, height) {
  const pos = Array.from({ length: n }, (_, i) => ({
    x: width / 2 + Math.cos(i) * width / 3 * Math.random(),
    y: height / 2 + Math.sin(i) * height / 3 * Math.random(),
  }));
  const k = Math.sqrt((width * height) / Math.max(n, 1)) * 0.6;
  for (let step = 0; step < 300; step++) {
    const temp = 10 * (1 - step / 300) + 0.5;
    const disp = pos.map(() => ({ x: 0, y: 0 }));
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y;
        const d = Math.max(Math.hypot(dx, dy), 0.01);
        const f = (k * k) / d / d;
        disp[i].x += dx * f; disp[i].y += dy * f;
        disp[j].x -= dx * f; disp[j].y -= dy * f;
      }
    }
    for (const [u, v] of edges) {
      const dx = pos[u].x - pos[v].x, dy = pos[u].y - pos[v].y;
      const d = Math.max(Math.hypot(dx, dy), 0.01);
      const f = d / k;
      disp[u].x -= dx * f; disp[u].y -= dy * f;
      disp[v].x += dx * f; disp[v].y += dy * f;
    }
    for (let i = 0; i < n; i++) {
      const d = Math.max(Math.hypot(disp[i].x, disp[i].y), 0.01);
      pos[i].x = Math.min(width - 12, Math.max(12, pos[i].x + (disp[i].x / d) * Math.min(d, temp)));
      pos[i].y = Math.min(height - 12, Math.max(12, pos[i].y + (disp[i].y / d) * Math.min(d, temp)));
    }
  }
  return pos;
}

function drawGraph(result) {
  const canvas = $("graph"), ctx = canvas.getContext("2d");
  const { ids, edges } = result.graph;
  if (!layout || layout.key !== $("edges").value) {
    layout = { key: $("edges").value, pos: forceLayout(ids.length, edges, canvas.width, canvas.height) };
  }
  const pos = layout.pos;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#bbb";
  for (const [u, v] of edges) {
    ctx.beginPath(); ctx.moveTo(pos[u].x, pos[u].y); ctx.lineTo(pos[v].x, pos[v].y); ctx.stroke();
  }
  ctx.font = "10px sans-serif";
  ctx.textAlign = "center";
  ids.forEach((id, i) => {
    ctx.fillStyle = COLORS[result.labels[i] % COLORS.length];
    ctx.beginPath(); ctx.arc(pos[i].x, pos[i].y, 7, 0, 2 * Math.PI); ctx.fill();
    ctx.fillStyle = "#fff"; ctx.fillText(String(id), pos[i].x, pos[i].y + 3);
  });
}

function drawSeries(series, marker, yLabel) {
  const canvas = $("curve"), ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pad = 30, w = canvas.width - 2 * pad, h = canvas.height - 2 * pad;
  const pts = series.flatMap((s) => s.points.filter(([, y]) => y !== null && Number.isFinite(y)));
  if (pts.length === 0) return;
  const xs = pts.map((p) => p[0]), ys = pts.map((p) => p[1]);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * w;
  const sy = (y) => pad + h - ((y - y0) / (y1 - y0 || 1)) * h;
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w, h);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(`${yLabel}  [${y0.toFixed(3)}, ${y1.toFixed(3)}]`, pad, pad - 8);
  series.forEach(({ points, color }) => {
    ctx.strokeStyle = color;
    ctx.beginPath();
    let pen = false;
    for (const [x, y] of points) {
      if (y === null || !Number.isFinite(y)) { pen = false; continue; }
      pen ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y));
      pen = true;
    }
    ctx.stroke();
  });
  if (marker !== null) {
    ctx.strokeStyle = "#d1495b";
    ctx.beginPath(); ctx.moveTo(sx(marker), pad); ctx.lineTo(sx(marker), pad + h); ctx.stroke();
  }
}

function runCluster() {
  const lambda = Number($("lambda").value);
  try {
    const r = JSON.parse(cluster($("edges").value, $("method").value, lambda, $("criterion").value));
    drawGraph(r);
    if (r.curve.length > 0) {
      drawSeries([{ points: r.curve.map((v, i) => [i + 1, v]), color: "#2e4057" }], r.best_u, `${$("criterion").value} by prefix size`);
    } else {
      $("curve").getContext("2d").clearRect(0, 0, 640, 200);
    }
    const sizes = r.labels.reduce((acc, l) => ((acc[l] = (acc[l] || 0) + 1), acc), []);
    $("status").textContent =
      `${r.graph.ids.length} nodes, ${r.graph.edges.length} edges, ${r.graph.triangles} triangles\n` +
      `cluster sizes ${sizes.join(" / ")}` +
      (r.criterion_value !== null ? `, criterion ${r.criterion_value.toFixed(4)} at u = ${r.best_u}` : "") +
      (r.notes.length ? `\n${r.notes.join("\n")}` : "");
  } catch (e) {
    $("status").textContent = `error: ${e}`;
  }
}

function runScan() {
  try {
    const points = JSON.parse(lambda_scan($("edges").value, $("truth").value, $("method").value, $("criterion").value, 21));
    drawSeries(
      [{ points: points.map((p) => [p.lambda, p.nmi]), color: "#00798c" }],
      Number($("lambda").value),
      "NMI against the ground truth by λ",
    );
    $("status").textContent = points
      .map((p) => p.error ? `λ=${p.lambda.toFixed(2)}  ${p.error}` : `λ=${p.lambda.toFixed(2)}  nmi=${p.nmi.toFixed(3)}  eps_n=${p.eps_n}  eps_t=${p.eps_t}`)
      .join("\n");
  } catch (e) {
    $("status").textContent = `error: ${e}`;
  }
}

await init();
$("edges").value = sample_edges();
$("truth").value = sample_truth();
$("lambda").addEventListener("input", () => {
  $("lambda-value").textContent = Number($("lambda").value).toFixed(2);
  runCluster();
});
for (const id of ["method", "criterion"]) $(id).addEventListener("change", runCluster);
$("run").addEventListener("click", runCluster);
$("scan").addEventListener("click", runScan);
runCluster();
