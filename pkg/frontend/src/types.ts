export interface Outcome {
    p: number; // -2..2, negative: candidate A preferred
    c: number; // 1..4, 4 = absolutely sure
}

export interface ProblemBody {
    n: number;
    lower: number[];
    upper: number[];
    linear?: { a: number[]; b: number }[];
}

export interface SessionConfig {
    mode?: "ampl" | "apl-rbf";
    n_init?: number;
    n_max?: number;
    alpha_bar?: number;
    sigma1?: number;
    sigma2?: number;
    lam?: number;
    seed?: number;
    scan_points?: number | null;
    refine_iters?: number;
    cv_period?: number;
}

export interface QueryView {
    query_id: string;
    a: number[];
    b: number[];
    purpose: "vs_previous" | "vs_best";
    iteration: number;
    n_max: number;
    preview_a?: string;
    preview_b?: string;
}

export interface DoneView {
    done: true;
    iteration: number;
    n_max: number;
}

export interface PendingView {
    propose_pending: true;
}

export type NextQueryResponse = QueryView | DoneView | PendingView;

export interface BestView {
    index: number;
    x: number[];
    iteration: number;
    n_max: number;
    phase: string;
}

export interface HistoryEvent {
    seq: number;
    type: string;
    [key: string]: unknown;
}
