import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { Meta, Observables, WindowPayload } from "../src/types.js";

interface GoldenDoc {
  meta: Meta;
  observables: Observables;
  windows: WindowPayload[];
}

const here = dirname(fileURLToPath(import.meta.url));

export function loadGolden(): GoldenDoc {
  return JSON.parse(readFileSync(join(here, "fixtures", "golden.json"), "utf-8")) as GoldenDoc;
}
