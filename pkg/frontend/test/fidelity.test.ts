/** UI fidelity: a scripted 50-turn devil session driven through the
 * console code path exports a trace byte-identical to the same script run
 * via the harness, and over-budget deposits are rejected with the session
 * state unchanged. */

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { driveScript, ScriptTurn } from "../src/driver.js";
import { ServiceClient } from "../src/protocol.js";
import { BoardViewModel } from "../src/viewmodel.js";

const PORT = 18000 + (process.pid % 2000);
const BASE = `http://127.0.0.1:${PORT}`;
const REPO = join(__dirname, "..", "..");
let server: ChildProcess;

async function waitReady(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const resp = await fetch(`${BASE}/get-view`, { method: "POST", body: "session none" });
      if (resp.status === 400) return; // service answers protocol errors
    } catch {
      await new Promise((r) => setTimeout(r, 150));
    }
  }
  throw new Error("service did not come up");
}

function makeScript(turns: number): ScriptTurn[] {
  const script: ScriptTurn[] = [];
  for (let i = 0; i < turns; i++) {
    const deposits: Array<[number, number, string]> = [];
    if (i % 3 === 0) deposits.push([5 + (i % 7), 2 + ((i * 5) % 11), "1/8"]);
    if (i % 5 === 0) deposits.push([-3 + (i % 4), 6, "1/16"]);
    script.push({ dt: 1, deposits, verdict: "succ" });
  }
  return script;
}

beforeAll(async () => {
  server = spawn("python3", ["-m", "adgame.cli", "serve", "--toy",
    "--host", "127.0.0.1", "--port", String(PORT)], {
    cwd: REPO,
    stdio: ["ignore", "pipe", "pipe"],
  });
  await waitReady();
}, 30000);

afterAll(() => {
  server?.kill();
});

describe("console/harness fidelity", () => {
  it("a scripted 50-turn session exports a byte-identical trace", async () => {
    const script = makeScript(50);
    const result = await driveScript(BASE, script, {
      devil: "scripted", seed: 0, horizon: 50,
    });
    expect(result.turns).toBe(50);
    expect(result.rejected).toBe(0);

    const dir = mkdtempSync(join(tmpdir(), "adgame-"));
    const scriptPath = join(dir, "script.json");
    const tracePath = join(dir, "harness.trace");
    writeFileSync(scriptPath, JSON.stringify(
      script.map((t) => ({ dt: t.dt, deposits: t.deposits.map((d) => [d[0], d[1], d[2]]), verdict: t.verdict })),
    ));
    const run = spawnSync("python3", ["-m", "adgame.cli", "play", "--toy",
      "--script", scriptPath, "--horizon", "50", "--trace-out", tracePath], {
      cwd: REPO, encoding: "utf-8",
    });
    expect(run.status, run.stderr).toBe(0);
    const harnessTrace = readFileSync(tracePath, "utf-8");
    expect(result.trace).toBe(harnessTrace);
  }, 60000);

  it("over-budget deposits are rejected with state unchanged", async () => {
    const client = new ServiceClient(BASE);
    const vm = new BoardViewModel();
    vm.applyView(await client.createSession());
    const session = vm.view!.session;

    // client-side gate blocks before send
    vm.dt = 1;
    vm.addDeposit([2, 2], "9/1");
    expect(vm.overBudget()).toBe(true);
    expect(vm.canSubmit()).toBe(false);

    // a forced over-budget request is rejected server-side, state unchanged
    const before = await client.getView(session);
    await expect(client.devilTurn(session, 1, [{ cell: [2, 2], amount: "9/1" }]))
      .rejects.toThrow(/over budget/);
    const after = await client.getView(session);
    expect(after.angel).toEqual(before.angel);
    expect(after.t).toBe(before.t);
    expect(after.mass).toEqual(before.mass);
    await client.closeSession(session);
  }, 30000);
});
