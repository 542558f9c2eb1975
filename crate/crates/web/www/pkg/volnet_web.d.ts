/* tslint:disable */
/* eslint-disable */

export class TrainResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly lossSvg: string;
    readonly regressionSvg: string;
    readonly summary: string;
}

export function samplePrices(symbol: string, seed: number): string;

export function train(architecture: string, algorithm: string, hidden: number, max_epochs: number, seed: number): TrainResult;

export function volatilitySvg(prices: string, window: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_trainresult_free: (a: number, b: number) => void;
    readonly samplePrices: (a: number, b: number, c: number) => [number, number, number, number];
    readonly train: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly trainresult_lossSvg: (a: number) => [number, number];
    readonly trainresult_regressionSvg: (a: number) => [number, number];
    readonly trainresult_summary: (a: number) => [number, number];
    readonly volatilitySvg: (a: number, b: number, c: number) => [number, number, number, number];
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
