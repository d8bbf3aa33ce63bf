import { describe, expect, it } from "vitest";

import { validateOutcomeSet, type RuleName } from "../src/rules.js";
import type { Outcome } from "../src/types.js";

function expectRule(outcomes: Outcome[], rule: RuleName) {
    const verdict = validateOutcomeSet(outcomes);
    expect(verdict.ok).toBe(false);
    if (!verdict.ok) {
        expect(verdict.rule).toBe(rule);
    }
}

describe("validateOutcomeSet", () => {
    it("accepts singletons at every likert and certainty level", () => {
        for (let p = -2; p <= 2; p++) {
            for (let c = 1; c <= 4; c++) {
                expect(validateOutcomeSet([{ p, c }]).ok).toBe(true);
            }
        }
    });

    it("accepts adjacent sign-consistent pairs and sorts them", () => {
        const verdict = validateOutcomeSet([
            { p: -1, c: 2 },
            { p: -2, c: 3 },
        ]);
        expect(verdict.ok).toBe(true);
        if (verdict.ok) {
            expect(verdict.normalized.map((o) => o.p)).toEqual([-2, -1]);
        }
    });

    it("rejects the documented rule violations", () => {
        expectRule([], "Empty");
        expectRule([{ p: 3, c: 1 }], "OutOfRangeLikert");
        expectRule([{ p: 0, c: 0 }], "OutOfRangeCertainty");
        expectRule(
            [
                { p: 1, c: 1 },
                { p: 1, c: 2 },
            ],
            "DuplicateLikert",
        );
        expectRule(
            [
                { p: -1, c: 2 },
                { p: 1, c: 2 },
            ],
            "MixedSigns",
        );
        expectRule(
            [
                { p: -2, c: 2 },
                { p: 0, c: 2 },
            ],
            "NotContiguous",
        );
        expectRule(
            [
                { p: -1, c: 4 },
                { p: 0, c: 1 },
            ],
            "CertaintyFourNotSingleton",
        );
    });

    it("reports mixed signs before contiguity", () => {
        expectRule(
            [
                { p: -1, c: 2 },
                { p: 1, c: 3 },
            ],
            "MixedSigns",
        );
    });
});
