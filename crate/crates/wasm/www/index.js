// Expects the wasm-bindgen `--target web` output in ./pkg.
import init, {
  quantization_curve,
  even_levels,
  expansion_curve_json,
  cycle_ledger_json,
} from "./pkg/szilard_wasm.js";

const $ = (id) => document.getElementById(id);

function frame(canvas, xr, yr) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const sx = (x) => pad + ((x - xr[0]) / (xr[1] - xr[0])) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - yr[0]) / (yr[1] - yr[0])) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(xr[0].toFixed(1), pad, h - pad + 14);
  ctx.fillText(xr[1].toFixed(1), w - pad - 20, h - pad + 14);
  ctx.fillText(yr[1].toFixed(1), 4, pad + 4);
  ctx.fillText(yr[0].toFixed(1), 4, h - pad);
  return { ctx, sx, sy };
}

function line(p, xs, ys, color, dash = []) {
  const { ctx, sx, sy } = p;
  ctx.strokeStyle = color;
  ctx.setLineDash(dash);
  ctx.beginPath();
  let pen = false;
  for (let i = 0; i < xs.length; i++) {
    if (!Number.isFinite(ys[i])) { pen = false; continue; }
    if (pen) ctx.lineTo(sx(xs[i]), sy(ys[i]));
    else ctx.moveTo(sx(xs[i]), sy(ys[i]));
    pen = true;
  }
  ctx.stroke();
  ctx.setLineDash([]);
}

const E_MAX = 8;
const Y_CLIP = 8;

function drawQuantization() {
  const g = 10 ** Number($("g").value) - 0.01;
  $("g-val").textContent = g.toPrecision(4);
  const c = quantization_curve(E_MAX, 1600);
  const xs = [], ys = [];
  for (let i = 0; i < c.length; i += 2) {
    xs.push(c[i]);
    // break the line across poles
    ys.push(Math.abs(c[i + 1]) > Y_CLIP ? NaN : c[i + 1]);
  }
  const p = frame($("quant"), [0, E_MAX], [-Y_CLIP, Y_CLIP]);
  line(p, xs, ys, "#1565c0");
  line(p, [0, E_MAX], [g, g], "#888", [4, 4]);
  const roots = Array.from(even_levels(Math.max(g, 0), 4)).filter((e) => e < E_MAX);
  p.ctx.fillStyle = "#c62828";
  for (const e of roots) {
    p.ctx.beginPath();
    p.ctx.arc(p.sx(e), p.sy(Math.min(g, Y_CLIP)), 4, 0, 2 * Math.PI);
    p.ctx.fill();
  }
  $("roots").textContent = roots.map((e) => e.toFixed(6)).join(", ");
}

function drawExpansion() {
  const theta = 10 ** Number($("theta").value);
  $("theta-val").textContent = theta.toPrecision(3);
  let d;
  try {
    d = JSON.parse(expansion_curve_json(theta, 160, 5));
    $("expand-err").textContent = "";
  } catch (e) {
    $("expand-err").textContent = String(e);
    return;
  }
  const xmin = d.x0[d.x0.length - 1];
  const p = frame($("expand"), [xmin, 0], [-2, 10]);
  d.branches.forEach((b, k) => line(p, d.x0, b, `hsl(${210 + 25 * k},60%,45%)`));
  line(p, d.x0, d.a, "#000");
  line(p, d.x0, d.f, "#c62828", [6, 3]);
}

const LEDGER_ROWS = [
  ["w_insert", "insertion work (demon to particle)"],
  ["ds_measure", "entropy change at measurement"],
  ["w_extract", "expansion work (particle to demon)"],
  ["w_reset_min", "minimum pointer reset work"],
  ["net_gain_naive", "net gain without reset"],
  ["net_gain_full", "net gain with reset"],
];

function runCycle() {
  const theta = Number($("cycle-theta").value);
  const table = $("ledger");
  table.innerHTML = "";
  try {
    const l = JSON.parse(cycle_ledger_json(theta, $("cycle-spectral").checked));
    const rows = LEDGER_ROWS.map(([k, label]) => [label, l[k]]);
    if (l.spectral.status === "done") {
      rows.push(["spectral net gain with reset", l.spectral.net_gain_full]);
    } else {
      rows.push(["spectral cross-check", l.spectral.reason]);
    }
    for (const [label, v] of rows) {
      const tr = table.insertRow();
      tr.insertCell().textContent = label;
      tr.insertCell().textContent = typeof v === "number" ? v.toExponential(10) : v;
    }
    $("cycle-err").textContent = "";
  } catch (e) {
    $("cycle-err").textContent = String(e);
  }
}

await init();
$("g").addEventListener("input", drawQuantization);
$("theta").addEventListener("input", drawExpansion);
$("cycle-run").addEventListener("click", runCycle);
drawQuantization();
drawExpansion();
runCycle();
