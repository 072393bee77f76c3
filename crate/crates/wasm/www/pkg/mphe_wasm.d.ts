/* tslint:disable */
/* eslint-disable */

export class CurveResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly betas: Float64Array;
    readonly c_values: Float64Array;
    /**
     * `NaN` when the curve has no finite jump.
     */
    readonly estimate: number;
    readonly samples: Float64Array;
    readonly theoretical: number;
}

export class TrackingResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly mphe: Float64Array;
    readonly theoretical: Float64Array;
    readonly times: Float64Array;
}

export class WalkResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Indices into `prices` where `g` crosses the line from below.
     */
    readonly crossings: Uint32Array;
    /**
     * Aligned with `prices`; `NaN` before the first computable index.
     */
    readonly g: Float64Array;
    readonly line: Float64Array;
    readonly prices: Float64Array;
}

/**
 * Normalised MPHE of the `|sin(πt)|` generalised Weierstrass function
 * against its pointwise exponent.
 */
export function regularity_tracking(k_max: number, alpha_ref: number): TrackingResult;

/**
 * Random-walk prices with their MPHE, signal line and crossings.
 */
export function walk_signals(seed: bigint, n: number, sigma: number, w: number, height_k: number): WalkResult;

/**
 * Samples a Weierstrass function on `i/n` and estimates its exponent from
 * the jump of the semi-norm curve.
 */
export function weierstrass_curve(d: number, n: number): CurveResult;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curveresult_free: (a: number, b: number) => void;
    readonly __wbg_trackingresult_free: (a: number, b: number) => void;
    readonly __wbg_walkresult_free: (a: number, b: number) => void;
    readonly curveresult_betas: (a: number) => [number, number];
    readonly curveresult_c_values: (a: number) => [number, number];
    readonly curveresult_estimate: (a: number) => number;
    readonly curveresult_samples: (a: number) => [number, number];
    readonly curveresult_theoretical: (a: number) => number;
    readonly regularity_tracking: (a: number, b: number) => [number, number, number];
    readonly trackingresult_mphe: (a: number) => [number, number];
    readonly trackingresult_theoretical: (a: number) => [number, number];
    readonly trackingresult_times: (a: number) => [number, number];
    readonly walk_signals: (a: bigint, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly walkresult_crossings: (a: number) => [number, number];
    readonly walkresult_g: (a: number) => [number, number];
    readonly walkresult_line: (a: number) => [number, number];
    readonly walkresult_prices: (a: number) => [number, number];
    readonly weierstrass_curve: (a: number, b: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
