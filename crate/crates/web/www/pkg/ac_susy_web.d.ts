/* tslint:disable */
/* eslint-disable */

/**
 * Effective radial potential of one channel on `(0, 4 size]`.
 */
export function effectivePotential(geometry: string, rho: number, size: number, channel: number): string;

/**
 * Lowest grid eigenvalues and the discrete supercharge check.
 */
export function gridSpectrum(geometry: string, rho: number, size: number, channel: number, levels: number): string;

/**
 * Zero-mode profile on `[0, 4 size]` and the SUSY verdict.
 */
export function zeroMode(geometry: string, rho: number, size: number, consistent: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly effectivePotential: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly gridSpectrum: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly zeroMode: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
