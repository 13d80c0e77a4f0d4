/** Browser wiring for the devil console.
 *
 * One session per tab, strict request serialization: the submit button is
 * locked while a request is in flight and the board re-renders only from
 * server views.
 */

import { ServiceClient } from "./protocol.js";
import { BoardViewModel } from "./viewmodel.js";
import { DEFAULT_STYLE, renderBoard, screenToCell } from "./renderer.js";
import { fmt } from "./rational.js";

const $ = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

async function start(): Promise<void> {
  const base = (window as any).ADGAME_SERVICE ?? "http://127.0.0.1:8642";
  const client = new ServiceClient(base);
  const vm = new BoardViewModel();
  const canvas = $<HTMLCanvasElement>("board");
  const ctx = canvas.getContext("2d")!;

  const repaint = () => {
    renderBoard(ctx, vm);
    $("status").textContent = vm.view
      ? `angel at ${vm.view.angel[0]},${vm.view.angel[1]}  t=${vm.view.t}  ` +
        `pending ${vm.view.pending?.name ?? "-"}  headroom ${vm.view.headroom}`
      : "connecting";
    $("budget").textContent =
      `turn budget ${fmt(vm.turnBudget())}  selected ${fmt(vm.selectionTotal())}` +
      (vm.overBudget() ? "  OVER BUDGET" : "");
    $("history").textContent = vm.view?.hist.join("\n") ?? "";
    $("ledger").textContent = vm.view?.ledger.join("\n") ?? "";
    const sel = $("selection");
    sel.textContent = vm.selection
      .map((d) => `${d.cell[0]},${d.cell[1]} <- ${d.amount}`)
      .join("\n");
    ($<HTMLButtonElement>("submit")).disabled = !vm.canSubmit();
    const prompt = vm.landingPrompt();
    $("prompt").textContent = prompt.length
      ? "failure landings: " + prompt.map((o) => `${o.p[0]},${o.p[1]}`).join(" ")
      : "";
    if (vm.lastError) $("error").textContent = vm.lastError;
  };

  const refresh = async () => {
    if (!vm.view) return;
    const r = vm.viewport;
    vm.applyView(
      await client.getView(vm.view.session, vm.zoom, [r.x0, r.y0, r.x1, r.y1]),
    );
    repaint();
  };

  vm.applyView(await client.createSession());
  vm.panTo(vm.view!.angel);
  await refresh();

  canvas.addEventListener("click", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const cell = screenToCell(vm, DEFAULT_STYLE.cellPx, ev.clientX - rect.left, ev.clientY - rect.top);
    const amount = ($<HTMLInputElement>("amount")).value || "1/8";
    vm.addDeposit(cell, amount);
    repaint();
  });

  $("zoomin").addEventListener("click", () => {
    vm.zoom = Math.max(0, vm.zoom - 1);
    void refresh();
  });
  $("zoomout").addEventListener("click", () => {
    vm.zoom += 1;
    void refresh();
  });
  $("clear").addEventListener("click", () => {
    vm.clearSelection();
    repaint();
  });
  $("follow").addEventListener("click", () => {
    if (vm.view) vm.panTo(vm.view.angel);
    void refresh();
  });

  $("submit").addEventListener("click", async () => {
    if (!vm.canSubmit() || !vm.view?.pending) return;
    vm.inFlight = true;
    vm.lastError = null;
    repaint();
    const dt = Number(($<HTMLInputElement>("dt")).value || "1");
    vm.dt = dt;
    try {
      const view = await client.devilTurn(
        vm.view.session,
        dt,
        vm.selection,
        vm.verdict,
        vm.landing ?? undefined,
      );
      vm.applyView(view);
      vm.clearSelection();
      vm.panTo(view.angel);
      await refresh();
    } catch (err) {
      // rejection: restore prior state and surface the server's reason
      vm.lastError = String(err);
    } finally {
      vm.inFlight = false;
      repaint();
    }
  });

  $("export").addEventListener("click", async () => {
    if (!vm.view) return;
    const trace = await client.exportTrace(vm.view.session);
    const blob = new Blob([trace], { type: "text/plain" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = `${vm.view.session}.trace`;
    a.click();
  });

  repaint();
}

start().catch((err) => {
  document.getElementById("error")!.textContent = String(err);
});
