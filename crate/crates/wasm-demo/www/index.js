import init, { Simulation, convergence_study } from "./pkg/rlw_wasm.js";

const $ = (id) => document.getElementById(id);
let sim = null;
let playing = false;

function reset() {
  if (sim) sim.free();
  sim = new Simulation($("preset").value, $("scheme").value);
  draw();
}

function draw() {
  const canvas = $("plot");
  const ctx = canvas.getContext("2d");
  const x = sim.x(), u = sim.u(), exact = sim.exact();
  const lo = Math.min(0, ...u), hi = Math.max(...u, ...exact, 0.1) * 1.1;
  const sx = (v) => ((v - x[0]) / (x[x.length - 1] - x[0])) * canvas.width;
  const sy = (v) => canvas.height - ((v - lo) / (hi - lo)) * canvas.height;

  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(0, sy(0));
  ctx.lineTo(canvas.width, sy(0));
  ctx.stroke();

  const line = (ys, style, dash) => {
    ctx.strokeStyle = style;
    ctx.setLineDash(dash);
    ctx.beginPath();
    ys.forEach((v, j) => (j ? ctx.lineTo(sx(x[j]), sy(v)) : ctx.moveTo(sx(x[j]), sy(v))));
    ctx.stroke();
  };
  if (exact.length) line(exact, "#c33", [6, 4]);
  line(u, "#036", []);
  ctx.setLineDash([]);

  $("t").textContent = `t = ${sim.time().toFixed(2)}`;
  $("dm").textContent = `mass drift ${sim.mass_drift().toExponential(2)}`;
  $("de").textContent = `energy drift ${sim.energy_drift().toExponential(2)}`;
  $("solves").textContent = `linear solves ${sim.linear_solves()}`;
}

function frame() {
  if (!playing) return;
  try {
    sim.advance(Number($("speed").value) || 1);
  } catch (e) {
    playing = false;
    $("play").textContent = "Play";
    alert(e.message ?? e);
    return;
  }
  draw();
  requestAnimationFrame(frame);
}

function runStudy() {
  const levels = Number($("levels").value);
  const out = convergence_study($("study-scheme").value, levels);
  let rows = "<tr><th>h = τ</th><th>L² error</th><th>L∞ error</th></tr>";
  for (let k = 0; k < levels; k++) {
    const [h, l2, li] = out.slice(3 * k, 3 * k + 3);
    rows += `<tr><td>${h}</td><td>${l2.toExponential(3)}</td><td>${li.toExponential(3)}</td></tr>`;
  }
  const [o2, oi] = out.slice(3 * levels);
  rows += `<tr><th>fitted order</th><td>${o2.toFixed(3)}</td><td>${oi.toFixed(3)}</td></tr>`;
  $("study").innerHTML = `<table>${rows}</table>`;
}

await init();
$("reset").onclick = reset;
$("preset").onchange = reset;
$("scheme").onchange = reset;
$("play").onclick = () => {
  playing = !playing;
  $("play").textContent = playing ? "Pause" : "Play";
  if (playing) requestAnimationFrame(frame);
};
$("run-study").onclick = () => {
  try {
    runStudy();
  } catch (e) {
    $("study").textContent = e.message ?? e;
  }
};
reset();
