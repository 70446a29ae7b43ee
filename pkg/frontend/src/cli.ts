#!/usr/bin/env node
/** Figure renderer: node dist/cli.js --spec figure-spec.json
 *
 * Exit codes: 0 written, 2 bad spec or missing input, 3 schema mismatch.
 */

import { MissingInput, SchemaMismatch } from "./csv";
import { SpecError, renderToFile } from "./spec";

function main(argv: string[]): number {
  const idx = argv.indexOf("--spec");
  if (idx === -1 || idx + 1 >= argv.length) {
    process.stderr.write("usage: cli.js --spec PATH\n");
    return 2;
  }
  try {
    const out = renderToFile(argv[idx + 1]);
    process.stdout.write(`${out}\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaMismatch) {
      process.stderr.write(`schema mismatch: ${(err as Error).message}\n`);
      return 3;
    }
    if (err instanceof SpecError || err instanceof MissingInput) {
      process.stderr.write(`spec error: ${(err as Error).message}\n`);
      return 2;
    }
    throw err;
  }
}

process.exit(main(process.argv.slice(2)));
