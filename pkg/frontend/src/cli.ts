import { renderSpecFile } from "./figures.js";

const args = process.argv.slice(2);
if (args.length !== 1) {
  console.error("usage: figures <spec-file.json>");
  process.exit(2);
}

try {
  for (const path of renderSpecFile(args[0]!)) {
    console.log(`wrote ${path}`);
  }
} catch (err) {
  console.error(err instanceof Error ? err.message : String(err));
  process.exit(1);
}
