/** Headless scripted session driver.
 *
 * Drives the same code path the browser uses (view model + protocol
 * client) so a scripted console session is comparable byte-for-byte with
 * a harness run of the same script.
 */

import { DepositSelection, ServiceClient } from "./protocol.js";
import { BoardViewModel } from "./viewmodel.js";

export interface ScriptTurn {
  dt: number;
  deposits: Array<[number, number, string]>;
  verdict?: "succ" | "fail";
}

export interface DriveResult {
  trace: string;
  rejected: number;
  turns: number;
  finalAngel: [number, number];
}

export async function driveScript(
  baseUrl: string,
  script: ScriptTurn[],
  meta?: { devil?: string; seed?: number; horizon?: number },
): Promise<DriveResult> {
  const client = new ServiceClient(baseUrl);
  const vm = new BoardViewModel();
  vm.applyView(await client.createSession(meta));
  let rejected = 0;
  let turns = 0;
  for (const turn of script) {
    if (!vm.view?.pending) break;
    vm.dt = turn.dt;
    vm.clearSelection();
    for (const [x, y, amount] of turn.deposits) {
      vm.addDeposit([x, y], amount);
    }
    if (vm.overBudget()) {
      rejected += 1; // blocked client-side; state unchanged
      continue;
    }
    const deposits: DepositSelection[] = vm.selection;
    vm.inFlight = true;
    try {
      const view = await client.devilTurn(
        vm.view.session,
        vm.dt,
        deposits,
        turn.verdict,
      );
      vm.applyView(view);
      turns += 1;
    } catch (err) {
      rejected += 1;
      vm.lastError = String(err);
    } finally {
      vm.inFlight = false;
    }
  }
  const trace = await client.exportTrace(vm.view!.session);
  return {
    trace,
    rejected,
    turns,
    finalAngel: vm.view!.angel,
  };
}
