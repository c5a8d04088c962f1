import init, { evaluate, check, kernelProfile } from "./pkg/local_product_web.js";

const $ = (id) => document.getElementById(id);

function vector(id) {
  return $(id).value.split(",").map((s) => s.trim()).filter((s) => s.length).map(Number);
}

function show(id, fn) {
  const out = $(id);
  try {
    out.textContent = JSON.stringify(JSON.parse(fn()), null, 2);
    out.className = "";
  } catch (e) {
    let text = String(e);
    try {
      text = JSON.stringify(JSON.parse(e), null, 2);
    } catch (_) {}
    out.textContent = text;
    out.className = "err";
  }
}

function plot(canvas, t, re, im) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 36;
  ctx.clearRect(0, 0, w, h);
  const ys = re.concat(im).filter((v) => v !== null && Number.isFinite(v));
  if (!ys.length) return;
  let lo = Math.min(...ys), hi = Math.max(...ys);
  if (hi - lo < 1e-12) { lo -= 1; hi += 1; }
  const X = (x) => pad + x * (w - 2 * pad);
  const Y = (y) => h - pad - ((y - lo) / (hi - lo)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad); ctx.lineTo(pad, h - pad); ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
  if (lo < 0 && hi > 0) {
    ctx.setLineDash([4, 4]);
    ctx.beginPath(); ctx.moveTo(pad, Y(0)); ctx.lineTo(w - pad, Y(0)); ctx.stroke();
    ctx.setLineDash([]);
  }
  ctx.fillStyle = "#444";
  ctx.fillText(hi.toPrecision(4), 2, pad);
  ctx.fillText(lo.toPrecision(4), 2, h - pad);
  ctx.fillText("t = 0 (|a|)", pad, h - 10);
  ctx.fillText("t = 1 (|b|)", w - pad - 60, h - 10);
  for (const [ys, color] of [[re, "#1f77b4"], [im, "#d62728"]]) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    let pen = false;
    t.forEach((x, i) => {
      const y = ys[i];
      if (y === null || !Number.isFinite(y)) { pen = false; return; }
      if (pen) ctx.lineTo(X(x), Y(y)); else ctx.moveTo(X(x), Y(y));
      pen = true;
    });
    ctx.stroke();
  }
}

await init();

$("ev-run").onclick = () => show("ev-out", () =>
  evaluate(JSON.stringify({ a: vector("ev-a"), b: vector("ev-b"), k: Number($("ev-k").value), sheet: $("ev-sheet").value })));

$("ck-run").onclick = () => show("ck-out", () =>
  check($("ck-thm").value, JSON.stringify({ a: vector("ck-a"), b: vector("ck-b"), s: Number($("ck-s").value) })));

$("pf-run").onclick = () => {
  $("pf-out").textContent = "";
  $("pf-out").className = "";
  try {
    const req = { a: vector("pf-a"), b: vector("pf-b"), k: Number($("pf-k").value), sheet: $("pf-sheet").value, points: 400 };
    const p = JSON.parse(kernelProfile(JSON.stringify(req)));
    plot($("pf-canvas"), p.t, p.re, p.im);
    $("pf-out").textContent = `scale = ${p.scale}`;
  } catch (e) {
    $("pf-out").textContent = String(e);
    $("pf-out").className = "err";
  }
};

$("pf-run").onclick();
