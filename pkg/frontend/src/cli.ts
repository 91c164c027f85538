#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { FigureSpec, XVar, YVar, parseFilters } from "./aggregate";
import { EmptySelection, SchemaError } from "./errors";
import { render } from "./render";

function runPlot(argv: any): void {
  const spec: FigureSpec = {
    x: argv.x as XVar,
    y: argv.y as YVar,
    filters: parseFilters(argv.filter as string[]),
    out: argv.out as string,
  };
  const result = render(argv.csv as string, spec);
  console.log(`rendered ${spec.out} series=${result.series.length}`
    + ` points=${result.nPoints}`);
  if (result.overlap !== null) {
    const pct = result.overlap * 100;
    console.log(`overlap gs-u/es-u max_gap=${pct.toFixed(4)}%`);
    const limit = argv.assertOverlap as number | undefined;
    if (limit !== undefined && pct >= limit) {
      throw new SchemaError(`gs-u/es-u mean gap ${pct.toFixed(4)}%`
        + ` exceeds the ${limit}% overlap bound`);
    }
  }
}

yargs(hideBin(process.argv))
  .scriptName("fdsched-plots")
  .command(
    "plot <csv>",
    "render one figure from a sweep CSV",
    (y) => y
      .positional("csv", { type: "string", demandOption: true,
        describe: "harness sweep CSV" })
      .option("x", { choices: ["snr_db", "eta", "k_min"] as const,
        default: "snr_db" as const, describe: "x-axis sweep variable" })
      .option("y", { choices: ["se", "evals"] as const,
        default: "se" as const, describe: "plot SE or evaluation counts" })
      .option("out", { type: "string", demandOption: true,
        describe: "output SVG path" })
      .option("filter", { type: "string", array: true, default: [] as string[],
        describe: "key=value row filter, repeatable" })
      .option("assert-overlap", { type: "number",
        describe: "fail when the gs-u/es-u mean SE gap is >= this many percent" }),
    (argv) => {
      try {
        runPlot(argv);
      } catch (err) {
        if (err instanceof SchemaError || err instanceof EmptySelection) {
          console.error(`${err.name}: ${err.message}`);
          process.exit(1);
        }
        if (err instanceof Error && (err as NodeJS.ErrnoException).code === "ENOENT") {
          console.error(`SchemaError: no such file ${argv.csv}`);
          process.exit(1);
        }
        console.error(err);
        process.exit(2);
      }
    })
  .demandCommand(1)
  .strict()
  .help()
  .parse();
