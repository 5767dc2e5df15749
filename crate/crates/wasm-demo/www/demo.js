import init, { boundary, coordinates, flow } from "./pkg/toda_lab_wasm.js";

const $ = (id) => document.getElementById(id);
const out = $("out");
const canvas = $("plot");
const ctx = canvas.getContext("2d");

function show(text, isError = false) {
  out.textContent = text;
  out.className = isError ? "err" : "";
}

function guard(fn) {
  return () => {
    try {
      fn();
    } catch (e) {
      show(String(e), true);
    }
  };
}

function draw(curves) {
  const all = curves.flatMap((c) => c.points);
  const r = Math.max(1e-9, ...all.map(([x, y]) => Math.max(Math.abs(x), Math.abs(y)))) * 1.1;
  const s = canvas.width / (2 * r);
  const px = ([x, y]) => [canvas.width / 2 + s * x, canvas.height / 2 - s * y];

  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(0, canvas.height / 2);
  ctx.lineTo(canvas.width, canvas.height / 2);
  ctx.moveTo(canvas.width / 2, 0);
  ctx.lineTo(canvas.width / 2, canvas.height);
  ctx.stroke();

  for (const { points, color } of curves) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    points.forEach((p, i) => {
      const [x, y] = px(p);
      i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    });
    ctx.closePath();
    ctx.stroke();
  }
}

const g = () => $("coeffs").value;
const order = () => Number($("order").value);
const fmt = ([re, im]) => `${re.toExponential(6)} ${im < 0 ? "-" : "+"} ${Math.abs(im).toExponential(6)}i`;

function onDraw() {
  const c = JSON.parse(boundary(g(), 512));
  draw([
    { points: c.g, color: "#1f6fb4" },
    { points: c.f, color: "#e07b00" },
  ]);
  show("");
}

function onCoords() {
  const c = JSON.parse(coordinates(g(), order(), Number($("mu").value), Number($("nu").value)));
  const lines = [`b = ${fmt(c.b)}`, `log τ = ${c.log_tau}`, ""];
  for (let k = 0; k < c.t.length; k++) {
    const n = k - c.order;
    lines.push(`n = ${String(n).padStart(3)}   t = ${fmt(c.t[k])}   v = ${fmt(c.v[k])}`);
  }
  show(lines.join("\n"));
}

function onFlow() {
  const frames = JSON.parse(
    flow(g(), order(), Number($("n").value), Number($("eps").value), Number($("steps").value)),
  );
  const last = frames.length - 1;
  draw(
    frames.map((f, i) => ({
      points: f.g,
      color: `hsl(${210 - (180 * i) / Math.max(1, last)}, 70%, 45%)`,
    })),
  );
  const mid = (frames[0].t.length - 1) / 2;
  const lines = frames.map(
    (f, i) => `step ${String(i).padStart(3)}   t0 = ${fmt(f.t[mid])}   log τ = ${f.log_tau.toFixed(10)}`,
  );
  show(lines.join("\n"));
}

await init();
$("draw").onclick = guard(onDraw);
$("coords").onclick = guard(onCoords);
$("flow").onclick = guard(onFlow);
guard(onDraw)();
