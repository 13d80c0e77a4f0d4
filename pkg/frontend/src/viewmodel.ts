/** Board view model: a pure function of the last server view plus the
 * pending input.  The client never evaluates game rules; it only gates
 * obviously over-budget submissions before they reach the wire and keeps
 * an optimistic lock while a request is in flight. */

import { DepositSelection, LandingOption, ServerView } from "./protocol.js";
import { Rational, ZERO, add, cmp, mulInt, rational } from "./rational.js";

export interface Viewport {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export class BoardViewModel {
  view: ServerView | null = null;
  zoom = 0;
  viewport: Viewport = { x0: -16, y0: -16, x1: 16, y1: 16 };
  selection: DepositSelection[] = [];
  dt = 1;
  verdict: "succ" | "fail" = "succ";
  landing: [number, number] | null = null;
  inFlight = false;
  trail: Array<[number, number]> = [];
  lastError: string | null = null;

  applyView(view: ServerView): void {
    const prev = this.view;
    this.view = view;
    if (!prev || prev.angel[0] !== view.angel[0] || prev.angel[1] !== view.angel[1]) {
      this.trail.push(view.angel);
      if (this.trail.length > 400) this.trail.shift();
    }
    const legal = new Set(view.options.map((o) => o.verdict));
    if (!legal.has(this.verdict)) {
      this.verdict = "succ";
      this.landing = null;
    }
  }

  /** sigma * dt: what the devil may deposit on this turn. */
  turnBudget(): Rational {
    if (!this.view) return ZERO;
    return mulInt(this.view.sigma, this.dt);
  }

  selectionTotal(): Rational {
    let total = ZERO;
    for (const d of this.selection) total = add(total, rational(d.amount));
    return total;
  }

  /** Client-side gate: an over-budget selection never reaches the wire. */
  overBudget(): boolean {
    return cmp(this.selectionTotal(), this.turnBudget()) > 0;
  }

  canSubmit(): boolean {
    return !!this.view?.pending && !this.inFlight && !this.overBudget();
  }

  addDeposit(cell: [number, number], amount: string): void {
    this.selection.push({ cell, amount });
  }

  clearSelection(): void {
    this.selection = [];
  }

  /** Landing choices to prompt for (failures of attack-bearing moves). */
  landingPrompt(): LandingOption[] {
    if (!this.view) return [];
    return this.view.options.filter((o) => o.verdict === "fail");
  }

  colonySide(): number {
    return Math.max(1, Math.pow(this.view?.q ?? 1, this.zoom));
  }

  /** Shade in [0, 1]: log scale capped at the badness threshold, which is
   * the colony side length at the active zoom level. */
  shadeFor(weight: Rational): number {
    const cap = this.colonySide();
    const w = Math.max(0, Number(weight.num) / Number(weight.den));
    const k = 63;
    const clamped = Math.min(w, cap);
    return Math.log1p((clamped / cap) * k) / Math.log1p(k);
  }

  panTo(center: [number, number], radius = 16): void {
    this.viewport = {
      x0: center[0] - radius,
      y0: center[1] - radius,
      x1: center[0] + radius,
      y1: center[1] + radius,
    };
  }
}
