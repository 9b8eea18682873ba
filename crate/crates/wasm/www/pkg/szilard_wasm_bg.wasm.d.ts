/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const cycle_ledger_json: (a: number, b: number) => [number, number, number, number];
export const even_levels: (a: number, b: number) => [number, number, number, number];
export const expansion_curve_json: (a: number, b: number, c: number) => [number, number, number, number];
export const quantization_curve: (a: number, b: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
