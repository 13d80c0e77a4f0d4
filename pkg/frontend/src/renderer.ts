/** Canvas rendering of the board: weight shading, colony grid lines at the
 * active zoom, the angel marker with its trail, and flag highlights.  All
 * content comes from the last server view. */

import { BoardViewModel } from "./viewmodel.js";

export interface RenderStyle {
  cellPx: number;
  gridColor: string;
  colonyColor: string;
  angelColor: string;
  trailColor: string;
  obstacleColor: string;
}

export const DEFAULT_STYLE: RenderStyle = {
  cellPx: 22,
  gridColor: "#e3e3e8",
  colonyColor: "#9a9ab0",
  angelColor: "#1766d9",
  trailColor: "rgba(23, 102, 217, 0.25)",
  obstacleColor: "#c22f2f",
};

export function renderBoard(
  ctx: CanvasRenderingContext2D,
  vm: BoardViewModel,
  style: RenderStyle = DEFAULT_STYLE,
): void {
  const view = vm.view;
  if (!view) return;
  const { x0, y0, x1, y1 } = vm.viewport;
  const px = style.cellPx;
  const w = (x1 - x0 + 1) * px;
  const h = (y1 - y0 + 1) * px;
  ctx.clearRect(0, 0, w, h);

  const toScreen = (cx: number, cy: number): [number, number] => [
    (cx - x0) * px,
    (y1 - cy) * px, // north is up
  ];

  // weight shading
  for (const [key, weight] of view.cells) {
    const [cx, cy] = key.split(",").map(Number);
    const side = vm.colonySide();
    const shade = vm.shadeFor(weight);
    if (shade <= 0) continue;
    const [sx, sy] = toScreen(cx, cy + side - 1);
    ctx.fillStyle = `rgba(40, 40, 48, ${0.15 + 0.85 * shade})`;
    ctx.fillRect(sx, sy, px * side, px * side);
    const tags = view.flags.get(key) ?? [];
    if (!tags.includes("safe")) {
      ctx.strokeStyle = style.obstacleColor;
      ctx.lineWidth = 2;
      ctx.strokeRect(sx + 1, sy + 1, px * side - 2, px * side - 2);
    }
  }

  // unit grid
  ctx.strokeStyle = style.gridColor;
  ctx.lineWidth = 1;
  for (let x = x0; x <= x1 + 1; x++) {
    const [sx] = toScreen(x, 0);
    ctx.beginPath();
    ctx.moveTo(sx, 0);
    ctx.lineTo(sx, h);
    ctx.stroke();
  }
  for (let y = y0; y <= y1 + 1; y++) {
    const [, sy] = toScreen(0, y);
    ctx.beginPath();
    ctx.moveTo(0, sy);
    ctx.lineTo(w, sy);
    ctx.stroke();
  }

  // colony grid lines at the active zoom level (Q^k alignment)
  const side = vm.colonySide();
  if (side > 1) {
    ctx.strokeStyle = style.colonyColor;
    ctx.lineWidth = 2;
    for (let x = Math.floor(x0 / side) * side; x <= x1 + 1; x += side) {
      const [sx] = toScreen(x, 0);
      ctx.beginPath();
      ctx.moveTo(sx, 0);
      ctx.lineTo(sx, h);
      ctx.stroke();
    }
    for (let y = Math.floor(y0 / side) * side; y <= y1 + 1; y += side) {
      const [, sy] = toScreen(0, y);
      ctx.beginPath();
      ctx.moveTo(0, sy);
      ctx.lineTo(w, sy);
      ctx.stroke();
    }
  }

  // trail and angel
  ctx.fillStyle = style.trailColor;
  for (const [tx, ty] of vm.trail) {
    const [sx, sy] = toScreen(tx, ty);
    ctx.fillRect(sx + px * 0.3, sy + px * 0.3, px * 0.4, px * 0.4);
  }
  const [ax, ay] = view.angel;
  const [sx, sy] = toScreen(ax, ay);
  ctx.fillStyle = style.angelColor;
  ctx.beginPath();
  ctx.arc(sx + px / 2, sy + px / 2, px * 0.38, 0, Math.PI * 2);
  ctx.fill();

  // landing prompt highlights
  for (const opt of vm.landingPrompt()) {
    const [lx, ly] = toScreen(opt.p[0], opt.p[1]);
    ctx.strokeStyle = "#d98017";
    ctx.lineWidth = 3;
    ctx.strokeRect(lx + 2, ly + 2, px - 4, px - 4);
  }
}

export function screenToCell(
  vm: BoardViewModel,
  px: number,
  sx: number,
  sy: number,
): [number, number] {
  const { x0, y1 } = vm.viewport;
  return [x0 + Math.floor(sx / px), y1 - Math.floor(sy / px)];
}
