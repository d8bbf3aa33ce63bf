// Client-side outcome-set validation. Mirrors the server's rules and rule
// names exactly, in the same precedence order, so the UI never sends a
// payload the server would reject.

import type { Outcome } from "./types.js";

export type RuleName =
    | "Empty"
    | "OutOfRangeLikert"
    | "OutOfRangeCertainty"
    | "DuplicateLikert"
    | "MixedSigns"
    | "NotContiguous"
    | "CertaintyFourNotSingleton";

export type ValidationResult =
    | { ok: true; normalized: Outcome[] }
    | { ok: false; rule: RuleName; message: string };

const LIKERT_VALUES = [-2, -1, 0, 1, 2];
const CERTAINTY_VALUES = [1, 2, 3, 4];

export function validateOutcomeSet(outcomes: Outcome[]): ValidationResult {
    if (outcomes.length === 0) {
        return { ok: false, rule: "Empty", message: "select at least one answer" };
    }
    for (const o of outcomes) {
        if (!LIKERT_VALUES.includes(o.p)) {
            return {
                ok: false,
                rule: "OutOfRangeLikert",
                message: `likert value ${o.p} is not in -2..2`,
            };
        }
        if (!CERTAINTY_VALUES.includes(o.c)) {
            return {
                ok: false,
                rule: "OutOfRangeCertainty",
                message: `certainty ${o.c} is not in 1..4`,
            };
        }
    }
    const ps = outcomes.map((o) => o.p);
    if (new Set(ps).size !== ps.length) {
        return {
            ok: false,
            rule: "DuplicateLikert",
            message: "the same likert value appears twice",
        };
    }
    if (ps.some((p) => p > 0) && ps.some((p) => p < 0)) {
        return {
            ok: false,
            rule: "MixedSigns",
            message: "answers cannot say both candidates are better",
        };
    }
    const sorted = [...outcomes].sort((a, b) => a.p - b.p);
    const span = sorted[sorted.length - 1].p - sorted[0].p;
    if (span !== sorted.length - 1) {
        return {
            ok: false,
            rule: "NotContiguous",
            message: "answers must be adjacent likert values",
        };
    }
    if (sorted.length > 1 && sorted.some((o) => o.c === 4)) {
        return {
            ok: false,
            rule: "CertaintyFourNotSingleton",
            message: "an absolutely-sure answer must stand alone",
        };
    }
    return { ok: true, normalized: sorted };
}
