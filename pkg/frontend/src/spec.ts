import * as fs from "fs";

import { MissingInput, SchemaMismatch } from "./csv";
import { deltaConvergence, eulerianPicture, functionalDecay,
         stabilityRatio } from "./figures";

export class SpecError extends Error {}

export const KINDS = ["functional-decay", "stability-ratio",
  "delta-convergence", "eulerian-picture"] as const;

export interface FigureSpec {
  kind: (typeof KINDS)[number];
  inputs: Record<string, string>;
  output: string;
}

const INPUT_KEYS: Record<string, string[]> = {
  "functional-decay": ["functionals"],
  "stability-ratio": ["stability"],
  "delta-convergence": ["sweep"],
  "eulerian-picture": ["regions", "boundary"],
};

export function loadSpec(path: string): FigureSpec {
  if (!fs.existsSync(path)) {
    throw new SpecError(`spec file not found: ${path}`);
  }
  let raw: unknown;
  try {
    raw = JSON.parse(fs.readFileSync(path, "utf8"));
  } catch (err) {
    throw new SpecError(`spec is not valid JSON: ${err}`);
  }
  const doc = raw as Record<string, unknown>;
  for (const key of Object.keys(doc)) {
    if (!["kind", "inputs", "output"].includes(key)) {
      throw new SpecError(`spec: unknown key "${key}"`);
    }
  }
  const kind = doc.kind as FigureSpec["kind"];
  if (!KINDS.includes(kind)) {
    throw new SpecError(
      `spec: kind must be one of ${KINDS.join(", ")}, got "${doc.kind}"`);
  }
  if (typeof doc.output !== "string" || !doc.output) {
    throw new SpecError("spec: output path is required");
  }
  const inputs = (doc.inputs ?? {}) as Record<string, unknown>;
  const required = INPUT_KEYS[kind];
  for (const key of Object.keys(inputs)) {
    if (![...required, "metadata"].includes(key)) {
      throw new SpecError(`spec: unknown input "${key}" for kind "${kind}"`);
    }
    if (typeof inputs[key] !== "string") {
      throw new SpecError(`spec: input "${key}" must be a path string`);
    }
  }
  for (const key of required) {
    if (!(key in inputs)) {
      throw new SpecError(`spec: kind "${kind}" needs input "${key}"`);
    }
  }
  return { kind, inputs: inputs as Record<string, string>,
           output: doc.output };
}

export function renderSpec(spec: FigureSpec): string {
  const meta = spec.inputs.metadata;
  switch (spec.kind) {
    case "functional-decay":
      return functionalDecay(spec.inputs.functionals, meta);
    case "stability-ratio":
      return stabilityRatio(spec.inputs.stability, meta);
    case "delta-convergence":
      return deltaConvergence(spec.inputs.sweep, meta);
    case "eulerian-picture":
      return eulerianPicture(spec.inputs.regions, spec.inputs.boundary, meta);
  }
}

export function renderToFile(specPath: string): string {
  const spec = loadSpec(specPath);
  const svg = renderSpec(spec);
  fs.writeFileSync(spec.output, svg);
  return spec.output;
}

export { MissingInput, SchemaMismatch };
