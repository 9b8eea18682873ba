/* tslint:disable */
/* eslint-disable */

/**
 * The cycle ledger at θ as JSON. `spectral` adds the level-sum
 * cross-check, which takes noticeably longer at small θ.
 */
export function cycle_ledger_json(theta: number, spectral: boolean): string;

/**
 * The lowest `count` even levels at barrier strength `g`.
 */
export function even_levels(g: number, count: number): Float64Array;

/**
 * Expansion stroke at θ from x0 = 0 to the default far wall:
 * `{x0: [...], a: [...], f: [...], branches: [[E_0...], ...]}`.
 */
export function expansion_curve_json(theta: number, points: number, branches: number): string;

/**
 * `points` samples of the quantization condition over (0, e_max), as
 * interleaved pairs `e0, rhs0, e1, rhs1, ...`. Poles come back as ±inf.
 */
export function quantization_curve(e_max: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly cycle_ledger_json: (a: number, b: number) => [number, number, number, number];
    readonly even_levels: (a: number, b: number) => [number, number, number, number];
    readonly expansion_curve_json: (a: number, b: number, c: number) => [number, number, number, number];
    readonly quantization_curve: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
