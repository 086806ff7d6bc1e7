import init, { lossyMap, similarityCurve, fidelityCurve } from "./pkg/fiberloop_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function report(el, err) {
  el.textContent = String(err.message ?? err);
  el.classList.add("error");
}

function drawHeatmap(canvas, rows) {
  const ctx = canvas.getContext("2d");
  const m = rows.length;
  const cell = canvas.width / m;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = `${Math.max(10, cell / 5)}px monospace`;
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  rows.forEach((row, i) =>
    row.forEach((v, j) => {
      const shade = Math.round(255 * (1 - v));
      ctx.fillStyle = `rgb(${shade}, ${shade}, 255)`;
      ctx.fillRect(j * cell, i * cell, cell, cell);
      ctx.fillStyle = v > 0.5 ? "#fff" : "#000";
      ctx.fillText(v.toFixed(2), (j + 0.5) * cell, (i + 0.5) * cell);
    }),
  );
}

function drawCurves(canvas, xs, series, xlabel) {
  const ctx = canvas.getContext("2d");
  const pad = 40;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * w;
  const py = (y) => pad + (1 - y) * h;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w, h);
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  ctx.fillText("1", pad - 14, pad + 4);
  ctx.fillText("0", pad - 14, pad + h + 4);
  ctx.fillText(x0.toFixed(2), pad, pad + h + 16);
  ctx.fillText(x1.toFixed(2), pad + w - 24, pad + h + 16);
  ctx.fillText(xlabel, pad + w / 2 - 20, pad + h + 30);
  for (const { ys, dash, width, color } of series) {
    ctx.beginPath();
    ctx.setLineDash(dash);
    ctx.lineWidth = width;
    ctx.strokeStyle = color;
    ys.forEach((y, k) => (k ? ctx.lineTo(px(xs[k]), py(y)) : ctx.moveTo(px(xs[k]), py(y))));
    ctx.stroke();
  }
  ctx.setLineDash([]);
  ctx.lineWidth = 1;
}

function updateMap() {
  const readout = $("map-readout");
  readout.classList.remove("error");
  $("map-etaf-v").textContent = num("map-etaf").toFixed(2);
  $("map-etas-v").textContent = num("map-etas").toFixed(2);
  try {
    const map = JSON.parse(lossyMap(num("map-m"), num("map-etaf"), num("map-etas"), num("map-seed")));
    drawHeatmap($("map-canvas"), map.magnitudes);
    readout.textContent =
      `L = ${map.loops} passes   S = ${map.similarity.toFixed(4)}   P_S = ${map.postselection.toExponential(3)}`;
  } catch (err) {
    report(readout, err);
  }
}

function runSimilarity() {
  const status = $("status");
  try {
    const c = JSON.parse(similarityCurve(num("sim-m"), num("sim-etas"), 0.7, 13, num("sim-iter"), num("sim-seed")));
    drawCurves($("sim-canvas"), c.eta_f, [
      { ys: c.s_max, dash: [], width: 2, color: "#1f4e9c" },
      { ys: c.s_mean, dash: [6, 4], width: 1.5, color: "#1f4e9c" },
      { ys: c.p_s_at_best, dash: [2, 3], width: 1.5, color: "#c0392b" },
    ], "η_f");
  } catch (err) {
    report(status, err);
  }
}

function runFidelity() {
  const status = $("status");
  try {
    const jitter = $("fid-axis").value === "sigma";
    const c = JSON.parse(fidelityCurve(num("fid-m"), jitter, num("fid-max"), 9, num("fid-trials"), num("fid-seed")));
    drawCurves($("fid-canvas"), c.x, [
      { ys: c.f_mean, dash: [], width: 2, color: "#2e7d32" },
      { ys: c.f_min, dash: [], width: 0.8, color: "#2e7d32" },
      { ys: c.f_max, dash: [], width: 0.8, color: "#2e7d32" },
    ], jitter ? "σ/c" : "δ/c");
  } catch (err) {
    report(status, err);
  }
}

await init();
$("status").textContent = "ready";
for (const id of ["map-m", "map-etaf", "map-etas", "map-seed"]) {
  $(id).addEventListener("input", updateMap);
}
$("sim-run").addEventListener("click", runSimilarity);
$("fid-run").addEventListener("click", runFidelity);
updateMap();
runSimilarity();
runFidelity();
