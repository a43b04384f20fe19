import { readFileSync } from "fs";
import { join } from "path";
import { describe, expect, it } from "vitest";

import {
  AGGREGATE_LABELS,
  CSV_FIELDS,
  parseSweepCsv,
  readSweepCsv,
  SchemaError,
} from "../src/schema.js";

const FIXTURES = join(__dirname, "fixtures");
const REF = join(FIXTURES, "ref.csv");

describe("parseSweepCsv", () => {
  it("splits the reference sweep into trial and aggregate rows", () => {
    const table = readSweepCsv(REF);
    expect(table.trials).toHaveLength(24);
    // 2 arms x 3 sample sizes x 3 aggregate labels
    expect(table.aggregates).toHaveLength(18);
    for (const row of table.aggregates) {
      expect(AGGREGATE_LABELS).toContain(row.label);
    }
    const arms = new Set(table.aggregates.map((r) => `${r.algo}:${r.adversary}`));
    expect(arms).toEqual(new Set(["adaboost:on", "bagged:on"]));
  });

  it("types trial fields: string seed, boolean in_spart1, null failure", () => {
    const trial = readSweepCsv(REF).trials[0]!;
    expect(typeof trial.seed).toBe("string");
    expect(trial.seed).toMatch(/^\d+$/);
    expect(typeof trial.inSpart1).toBe("boolean");
    expect(trial.failure).toBeNull();
    expect(trial.gamma).toBe(0.25);
    expect(trial.m).toBe(64);
  });

  it("keeps 64-bit seeds exact as strings", () => {
    const big = "17329250457670952392"; // above Number.MAX_SAFE_INTEGER
    const text = [
      CSV_FIELDS.join(","),
      `${big},64,124,1,1,0.25,2,1.0,adaboost,on,0.01,0.5,true,0.25,35,`,
    ].join("\n");
    expect(parseSweepCsv(text).trials[0]!.seed).toBe(big);
  });

  it("carries the failed/total pair on mean rows", () => {
    const means = readSweepCsv(REF).aggregates.filter((r) => r.label === "mean");
    expect(means.length).toBeGreaterThan(0);
    for (const row of means) {
      expect(row.failure).toMatch(/^\d+\/\d+$/);
    }
  });

  it("names the first out-of-order column in a reshuffled header", () => {
    const text = readFileSync(REF, "utf8");
    const tampered = text.replace("seed,m,u", "m,seed,u");
    expect(() => parseSweepCsv(tampered)).toThrowError(SchemaError);
    try {
      parseSweepCsv(tampered);
    } catch (err) {
      expect((err as SchemaError).column).toBe("seed");
      expect((err as SchemaError).message).toContain("seed");
    }
  });

  it("names an unexpected trailing column", () => {
    const text = readFileSync(REF, "utf8");
    // the harness writes \r\n rows, so splice before the terminator
    const tampered = text.replace("rounds_used,failure", "rounds_used,failure,extra");
    expect(() => parseSweepCsv(tampered)).toThrowError(/column "extra"/);
  });

  it("names the column holding a malformed number, with its line", () => {
    const text = readFileSync(REF, "utf8");
    const lines = text.split("\n");
    const cells = lines[1]!.split(",");
    cells[10] = "oops"; // exact_error
    lines[1] = cells.join(",");
    expect(() => parseSweepCsv(lines.join("\n"))).toThrowError(
      /column "exact_error": "oops" is not a number \(line 2\)/,
    );
  });

  it("rejects a non-boolean in_spart1 on trial rows", () => {
    const text = readFileSync(REF, "utf8");
    const lines = text.split("\n");
    const cells = lines[1]!.split(",");
    cells[12] = "0.7";
    lines[1] = cells.join(",");
    expect(() => parseSweepCsv(lines.join("\n"))).toThrowError(
      /column "in_spart1"/,
    );
  });

  it("rejects blank numeric cells instead of coercing them to zero", () => {
    const text = readFileSync(REF, "utf8");
    const lines = text.split("\n");
    const cells = lines[1]!.split(",");
    cells[5] = ""; // gamma
    lines[1] = cells.join(",");
    expect(() => parseSweepCsv(lines.join("\n"))).toThrowError(
      /column "gamma": empty value/,
    );
  });
});
