import { describe, expect, it } from "vitest";

import { parseView, turnBody } from "../src/protocol.js";
import { BoardViewModel } from "../src/viewmodel.js";
import { cmp, rational } from "../src/rational.js";

const SAMPLE = [
  "ok",
  "session s1",
  "angel 3,-2",
  "t 7",
  "mass 5/8",
  "budget 3/4",
  "sigma 1/4",
  "q 8",
  "pending step.N 3,-2",
  "headroom 2",
  "options succ@3,-1 fail@3,-3",
  "cells 1,1:1/8;2,2:3/4",
  "flags 1,1:good+safe+clean;2,2:good",
  "hist a 6 step.N 3,-3",
  "ledgertail 2 d1 kind=blameable-run charge=3/1 region=4,5",
  "",
].join("\n");

describe("protocol parsing", () => {
  it("parses every view field", () => {
    const v = parseView(SAMPLE);
    expect(v.session).toBe("s1");
    expect(v.angel).toEqual([3, -2]);
    expect(v.t).toBe(7);
    expect(cmp(v.mass, rational("5/8"))).toBe(0);
    expect(cmp(v.sigma, rational("1/4"))).toBe(0);
    expect(v.q).toBe(8);
    expect(v.pending).toEqual({ name: "step.N", w: [3, -2] });
    expect(v.headroom).toBe(2);
    expect(v.options).toHaveLength(2);
    expect(v.options[1]).toEqual({ verdict: "fail", p: [3, -3] });
    expect(v.cells.get("2,2")).toEqual(rational("3/4"));
    expect(v.flags.get("1,1")).toEqual(["good", "safe", "clean"]);
    expect(v.hist).toHaveLength(1);
    expect(v.ledger).toHaveLength(1);
  });

  it("throws on error payloads", () => {
    expect(() => parseView("err no such session\n")).toThrow(/no such session/);
  });

  it("builds turn bodies with deposits and landing", () => {
    const body = turnBody("s1", 2, [{ cell: [4, 5], amount: "1/8" }], "fail", [3, -3]);
    expect(body).toBe("session s1\ndt 2\ndeposit 4,5 1/8\nverdict fail\nlanding 3,-3\n");
  });
});

describe("board view model", () => {
  it("gates over-budget selections client-side", () => {
    const vm = new BoardViewModel();
    vm.applyView(parseView(SAMPLE));
    vm.dt = 2; // budget = sigma * dt = 1/2
    vm.addDeposit([1, 1], "1/4");
    vm.addDeposit([2, 2], "1/5");
    expect(vm.overBudget()).toBe(false);
    expect(vm.canSubmit()).toBe(true);
    vm.addDeposit([2, 3], "1/10");
    expect(vm.overBudget()).toBe(true);
    expect(vm.canSubmit()).toBe(false);
  });

  it("locks submissions while a request is in flight", () => {
    const vm = new BoardViewModel();
    vm.applyView(parseView(SAMPLE));
    expect(vm.canSubmit()).toBe(true);
    vm.inFlight = true;
    expect(vm.canSubmit()).toBe(false);
  });

  it("tracks the angel trail from server views only", () => {
    const vm = new BoardViewModel();
    vm.applyView(parseView(SAMPLE));
    vm.applyView(parseView(SAMPLE.replace("angel 3,-2", "angel 3,-1")));
    expect(vm.trail).toEqual([[3, -2], [3, -1]]);
  });

  it("exposes failure landings as the prompt", () => {
    const vm = new BoardViewModel();
    vm.applyView(parseView(SAMPLE));
    expect(vm.landingPrompt()).toEqual([{ verdict: "fail", p: [3, -3] }]);
  });

  it("shades weights on a log scale capped at the colony side", () => {
    const vm = new BoardViewModel();
    vm.applyView(parseView(SAMPLE));
    vm.zoom = 0;
    const light = vm.shadeFor(rational("1/100"));
    const heavy = vm.shadeFor(rational("1/1"));
    const over = vm.shadeFor(rational("50/1"));
    expect(light).toBeGreaterThan(0);
    expect(light).toBeLessThan(heavy);
    expect(heavy).toBe(1);
    expect(over).toBe(1); // capped at the badness threshold
  });

  it("realigns colony lines when zooming", () => {
    const vm = new BoardViewModel();
    vm.applyView(parseView(SAMPLE));
    expect(vm.colonySide()).toBe(1);
    vm.zoom = 1;
    expect(vm.colonySide()).toBe(8);
    vm.zoom = 2;
    expect(vm.colonySide()).toBe(64);
  });
});
