/* tslint:disable */
/* eslint-disable */

export class JsRace {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly replicates: number;
    readonly spsa: Float64Array;
    readonly stein: Float64Array;
    readonly stein_wins: number;
}

export function hessianErrorCurve(estimator: string, h22: number, c: number, draws: number, checkpoints: number, seed: number): Float64Array;

export function pdMap2x2(map: string, h11: number, h12: number, h22: number, k: number): Float64Array;

export function race(dim: number, iterations: number, replicates: number, seed: number): JsRace;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_jsrace_free: (a: number, b: number) => void;
    readonly hessianErrorCurve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly jsrace_replicates: (a: number) => number;
    readonly jsrace_spsa: (a: number) => [number, number];
    readonly jsrace_stein: (a: number) => [number, number];
    readonly jsrace_stein_wins: (a: number) => number;
    readonly pdMap2x2: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly race: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
