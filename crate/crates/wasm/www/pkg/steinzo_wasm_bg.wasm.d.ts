/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_jsrace_free: (a: number, b: number) => void;
export const hessianErrorCurve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const jsrace_replicates: (a: number) => number;
export const jsrace_spsa: (a: number) => [number, number];
export const jsrace_stein: (a: number) => [number, number];
export const jsrace_stein_wins: (a: number) => number;
export const pdMap2x2: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const race: (a: number, b: number, c: number, d: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
