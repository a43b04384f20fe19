#!/usr/bin/env node
/** Command line wrapper: `render --in sweep.csv... --out figs/ --figs ...`. */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { FIGURE_NAMES, FigureName, PlotJob, render } from "./render.js";

function parseFigs(raw: string): FigureName[] {
  const names = raw.split(",").map((s) => s.trim()).filter((s) => s !== "");
  for (const name of names) {
    if (!(FIGURE_NAMES as readonly string[]).includes(name)) {
      throw new Error(
        `unknown figure "${name}" (choose from ${FIGURE_NAMES.join(", ")})`,
      );
    }
  }
  return names as FigureName[];
}

await yargs(hideBin(process.argv))
  .command(
    "render",
    "Render figures from sweep CSVs",
    (cmd) =>
      cmd
        .option("in", {
          type: "string",
          array: true,
          demandOption: true,
          describe: "Sweep CSV path(s); each needs its .summary.json sibling",
        })
        .option("out", {
          type: "string",
          demandOption: true,
          describe: "Output directory for figures",
        })
        .option("figs", {
          type: "string",
          default: FIGURE_NAMES.join(","),
          describe: "Comma-separated figures to render",
        }),
    (argv) => {
      const job: PlotJob = {
        inputs: argv.in as string[],
        outDir: argv.out as string,
        figures: parseFigs(argv.figs as string),
      };
      try {
        const result = render(job);
        for (const path of result.written) {
          console.log(path);
        }
      } catch (err) {
        console.error(String(err instanceof Error ? err.message : err));
        process.exit(1);
      }
    },
  )
  .demandCommand(1)
  .strict()
  .help()
  .parse();
