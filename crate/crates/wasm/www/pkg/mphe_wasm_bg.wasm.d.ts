/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curveresult_free: (a: number, b: number) => void;
export const __wbg_trackingresult_free: (a: number, b: number) => void;
export const __wbg_walkresult_free: (a: number, b: number) => void;
export const curveresult_betas: (a: number) => [number, number];
export const curveresult_c_values: (a: number) => [number, number];
export const curveresult_estimate: (a: number) => number;
export const curveresult_samples: (a: number) => [number, number];
export const curveresult_theoretical: (a: number) => number;
export const regularity_tracking: (a: number, b: number) => [number, number, number];
export const trackingresult_mphe: (a: number) => [number, number];
export const trackingresult_theoretical: (a: number) => [number, number];
export const trackingresult_times: (a: number) => [number, number];
export const walk_signals: (a: bigint, b: number, c: number, d: number, e: number) => [number, number, number];
export const walkresult_crossings: (a: number) => [number, number];
export const walkresult_g: (a: number) => [number, number];
export const walkresult_line: (a: number) => [number, number];
export const walkresult_prices: (a: number) => [number, number];
export const weierstrass_curve: (a: number, b: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
