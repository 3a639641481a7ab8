import init, { t_chain_stats, grover_geometry, bit_tree } from "./pkg/eigenpath_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(id, v) {
  const el = $(id);
  el.classList.toggle("err", Boolean(v.error));
  el.textContent = v.error ? v.error : JSON.stringify(v, (k, x) => (typeof x === "number" ? +x.toFixed(4) : x), 1)
    .replace(/\n\s*/g, " ");
}

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return ctx;
}

function runT() {
  const v = JSON.parse(t_chain_stats(num("t-p"), num("t-p0"), num("t-n"), BigInt(num("t-seed"))));
  const { histogram, ...summary } = v;
  show("t-out", summary);
  if (v.error) return;
  const c = $("t-plot"), ctx = clear(c);
  const max = Math.max(...histogram), w = c.width / histogram.length;
  ctx.fillStyle = "#4a7bd0";
  histogram.forEach((h, k) => {
    const bh = (h / max) * (c.height - 20);
    ctx.fillRect(k * w + 1, c.height - bh - 14, w - 2, bh);
  });
  ctx.fillStyle = "#333";
  histogram.forEach((_, k) => { if (k % 5 === 0) ctx.fillText(String(2 * k + 1), k * w + 2, c.height - 2); });
}

function runGrover() {
  const v = JSON.parse(grover_geometry(num("g-n"), num("g-k")));
  show("g-out", v.error ? v : { items: v.items, min_gap: v.min_gap });
  if (v.error) return;
  const c = $("g-plot"), ctx = clear(c);
  const maxGap = Math.max(...v.points.map((p) => p.gap));
  const line = (key, scale, colour) => {
    ctx.strokeStyle = colour;
    ctx.beginPath();
    v.points.forEach((p, i) => {
      const x = p.s * c.width, y = c.height - (p[key] / scale) * (c.height - 10) - 5;
      i ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
    });
    ctx.stroke();
  };
  line("gap", maxGap, "#d04a4a");
  line("overlap", 1, "#4a7bd0");
  ctx.fillStyle = "#d04a4a"; ctx.fillText("gap", 6, 12);
  ctx.fillStyle = "#4a7bd0"; ctx.fillText("overlap with start", 40, 12);
}

function runBit() {
  const v = JSON.parse(bit_tree($("b-v").value, num("b-th")));
  const { nodes, ...summary } = v;
  show("b-out", summary);
  if (v.error) return;
  const c = $("b-plot"), ctx = clear(c);
  const depth = Math.max(...nodes.map((n) => n[2])) + 1, h = Math.min(24, c.height / depth);
  for (const [a, b, d, split] of nodes) {
    ctx.fillStyle = split ? "#d9a441" : "#5bb06a";
    ctx.fillRect(a * c.width + 1, d * h + 1, (b - a) * c.width - 2, h - 2);
  }
}

await init();
$("t-run").onclick = runT;
$("g-run").onclick = runGrover;
$("b-run").onclick = runBit;
runT();
runGrover();
runBit();
