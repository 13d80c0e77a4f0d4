/** Client for the session-service protocol.
 *
 * Requests are key-value text lines over POST; responses start with
 * "ok"/"err" followed by key-value lines.  The client performs no rule
 * evaluation: everything it shows comes from these payloads.
 */

import { Rational, rational } from "./rational.js";

export interface PendingMove {
  name: string;
  w: [number, number];
}

export interface LandingOption {
  verdict: "succ" | "fail";
  p: [number, number];
}

export interface ServerView {
  session: string;
  angel: [number, number];
  t: number;
  mass: Rational;
  budget: Rational;
  sigma: Rational;
  q: number;
  pending: PendingMove | null;
  headroom: number;
  options: LandingOption[];
  cells: Map<string, Rational>;
  flags: Map<string, string[]>;
  hist: string[];
  ledger: string[];
  watermark: string | null;
  angelStopped: string | null;
}

export class ProtocolError extends Error {}

export function parseView(text: string): ServerView {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines[0] !== "ok") {
    throw new ProtocolError(lines[0]?.replace(/^err\s*/, "") ?? "empty response");
  }
  const view: ServerView = {
    session: "",
    angel: [0, 0],
    t: 0,
    mass: rational(0n),
    budget: rational(0n),
    sigma: rational(0n),
    q: 1,
    pending: null,
    headroom: 0,
    options: [],
    cells: new Map(),
    flags: new Map(),
    hist: [],
    ledger: [],
    watermark: null,
    angelStopped: null,
  };
  for (const line of lines.slice(1)) {
    const sp = line.indexOf(" ");
    const key = sp < 0 ? line : line.slice(0, sp);
    const rest = sp < 0 ? "" : line.slice(sp + 1);
    switch (key) {
      case "session":
        view.session = rest;
        break;
      case "angel": {
        const [x, y] = rest.split(",").map(Number);
        view.angel = [x, y];
        break;
      }
      case "t":
        view.t = Number(rest);
        break;
      case "mass":
        view.mass = rational(rest);
        break;
      case "budget":
        view.budget = rational(rest);
        break;
      case "sigma":
        view.sigma = rational(rest);
        break;
      case "q":
        view.q = Number(rest);
        break;
      case "pending": {
        const [name, w] = rest.split(" ");
        const [wx, wy] = w.split(",").map(Number);
        view.pending = { name, w: [wx, wy] };
        break;
      }
      case "headroom":
        view.headroom = Number(rest);
        break;
      case "options":
        if (rest !== "-") {
          view.options = rest.split(" ").map((item) => {
            const [verdict, p] = item.split("@");
            const [x, y] = p.split(",").map(Number);
            return { verdict: verdict as "succ" | "fail", p: [x, y] as [number, number] };
          });
        }
        break;
      case "cells":
        if (rest !== "-") {
          for (const item of rest.split(";")) {
            const [cell, val] = item.split(":");
            view.cells.set(cell, rational(val));
          }
        }
        break;
      case "flags":
        if (rest !== "-") {
          for (const item of rest.split(";")) {
            const [cell, tags] = item.split(":");
            view.flags.set(cell, tags === "-" ? [] : tags.split("+"));
          }
        }
        break;
      case "hist":
        view.hist.push(rest);
        break;
      case "ledgertail":
        view.ledger.push(rest);
        break;
      case "watermark":
        view.watermark = rest;
        break;
      case "angel":
        break;
      case "reason":
        view.angelStopped = rest;
        break;
      default:
        break;
    }
  }
  return view;
}

export interface DepositSelection {
  cell: [number, number];
  amount: string; // "num/den"
}

export function turnBody(
  session: string,
  dt: number,
  deposits: DepositSelection[],
  verdict?: "succ" | "fail",
  landing?: [number, number],
): string {
  const lines = [`session ${session}`, `dt ${dt}`];
  for (const d of deposits) {
    lines.push(`deposit ${d.cell[0]},${d.cell[1]} ${d.amount}`);
  }
  if (verdict) lines.push(`verdict ${verdict}`);
  if (landing) lines.push(`landing ${landing[0]},${landing[1]}`);
  return lines.join("\n") + "\n";
}

export class ServiceClient {
  constructor(readonly baseUrl: string) {}

  private async post(path: string, body: string): Promise<string> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "text/plain" },
      body,
    });
    const text = await resp.text();
    if (!text.startsWith("ok")) {
      throw new ProtocolError(text.replace(/^err\s*/, "").trim());
    }
    return text;
  }

  async createSession(meta?: { devil?: string; seed?: number; horizon?: number }): Promise<ServerView> {
    const lines: string[] = [];
    if (meta?.devil) lines.push(`devil ${meta.devil}`);
    if (meta?.seed !== undefined) lines.push(`seed ${meta.seed}`);
    if (meta?.horizon !== undefined) lines.push(`horizon ${meta.horizon}`);
    return parseView(await this.post("/create-session", lines.join("\n")));
  }

  async devilTurn(
    session: string,
    dt: number,
    deposits: DepositSelection[],
    verdict?: "succ" | "fail",
    landing?: [number, number],
  ): Promise<ServerView> {
    return parseView(await this.post("/devil-turn", turnBody(session, dt, deposits, verdict, landing)));
  }

  async getView(session: string, zoom = 0, viewport?: [number, number, number, number]): Promise<ServerView> {
    let body = `session ${session}\nzoom ${zoom}\n`;
    if (viewport) body += `viewport ${viewport.join(",")}\n`;
    return parseView(await this.post("/get-view", body));
  }

  async exportTrace(session: string): Promise<string> {
    const text = await this.post("/export-trace", `session ${session}\n`);
    const lines = text.split("\n");
    const begin = lines.indexOf("trace-begin");
    const end = lines.indexOf("trace-end");
    return lines.slice(begin + 1, end).join("\n") + "\n";
  }

  async closeSession(session: string): Promise<void> {
    await this.post("/close-session", `session ${session}\n`);
  }
}
