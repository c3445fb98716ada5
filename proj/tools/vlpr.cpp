#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vlpr/cli.hpp"

namespace {

using namespace vlpr;

std::optional<PlateType> parse_type_flag(const std::string& s) {
  if (s.empty() || s == "random") return std::nullopt;
  if (const auto t = parse_plate_type(s)) return t;
  throw cli::UsageError("--type must be Red, Yellow, White or random");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicle license plate recognition and parking gate toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "vlpr 1.0");

  cli::TrainOptions train;
  auto* c_train = app.add_subcommand("train", "Train the glyph classifier and print its evaluation");
  c_train->add_option("--corpus", train.corpus, "Glyph corpus directory (<label>_<serial>.pbm)");
  c_train->add_option("--synthetic", train.synthetic_per_class, "Generate N jittered glyphs per class instead");
  c_train->add_option("--out,-o", train.out, "Model file to write")->required();
  c_train->add_option("--ratio", train.ratio, "Training share of every class")->capture_default_str();
  c_train->add_option("--seed", train.seed, "Split and generator seed")->capture_default_str();
  c_train->add_option("--config,-c", train.config, "Configuration file");

  cli::RecognizeOptions rec;
  auto* c_rec = app.add_subcommand("recognize", "Read plates in images");
  c_rec->add_option("images", rec.images, "Image files (BMP, PPM, PGM)")->required();
  c_rec->add_option("--model,-m", rec.model, "Model file")->required();
  c_rec->add_option("--config,-c", rec.config, "Configuration file");
  c_rec->add_option("--jobs,-j", rec.jobs, "Worker threads")->capture_default_str()->check(CLI::Range(1, 256));
  c_rec->add_flag("--json", rec.json, "Machine-readable output");

  cli::GenOptions gen;
  std::string gen_type, gen_palette = "classic";
  double gen_tilt = 0.0;
  bool no_distractors = false;
  auto* c_gen = app.add_subcommand("gen", "Generate synthetic scenes and a truth manifest");
  c_gen->add_option("--seed", gen.seed)->capture_default_str();
  c_gen->add_option("--count,-n", gen.count)->capture_default_str();
  c_gen->add_option("--out,-o", gen.out, "Output directory")->required();
  c_gen->add_option("--width", gen.spec.width)->capture_default_str();
  c_gen->add_option("--height", gen.spec.height)->capture_default_str();
  c_gen->add_option("--plates", gen.spec.plates, "Plates per scene")->capture_default_str();
  c_gen->add_option("--tilt-max", gen.spec.tilt_max_deg, "Random tilt range in degrees")->capture_default_str();
  auto* tilt_opt = c_gen->add_option("--tilt", gen_tilt, "Fixed tilt in degrees");
  c_gen->add_option("--scale-min", gen.spec.scale_min)->capture_default_str();
  c_gen->add_option("--scale-max", gen.spec.scale_max)->capture_default_str();
  c_gen->add_option("--type", gen_type, "Red, Yellow, White or random");
  c_gen->add_option("--palette", gen_palette, "classic or standard")
      ->check(CLI::IsMember({"classic", "standard"}))
      ->capture_default_str();
  c_gen->add_option("--speckle", gen.spec.speckle, "Salt and pepper fraction")->capture_default_str();
  c_gen->add_option("--noise", gen.spec.noise, "Per-channel noise amplitude")->capture_default_str();
  c_gen->add_flag("--no-distractors", no_distractors);

  cli::GenGlyphsOptions glyphs;
  auto* c_glyphs = app.add_subcommand("gen-glyphs", "Write a jittered glyph corpus");
  c_glyphs->add_option("--seed", glyphs.seed)->capture_default_str();
  c_glyphs->add_option("--per-class", glyphs.per_class)->capture_default_str();
  c_glyphs->add_option("--out,-o", glyphs.out, "Output directory")->required();
  c_glyphs->add_option("--config,-c", glyphs.config, "Configuration file (alphabet)");

  cli::FontOptions font;
  auto* c_font = app.add_subcommand("font", "Write the reference glyph of every font label");
  c_font->add_option("--out,-o", font.out)->capture_default_str();

  cli::EvalOptions eval;
  auto* c_eval = app.add_subcommand("eval", "Score recognition against a generated scene set");
  c_eval->add_option("--scenes,-s", eval.scenes, "Scene directory with truth.txt")->required();
  c_eval->add_option("--model,-m", eval.model, "Model file")->required();
  c_eval->add_option("--config,-c", eval.config, "Configuration file");
  c_eval->add_option("--jobs,-j", eval.jobs, "Worker threads")->capture_default_str()->check(CLI::Range(1, 256));
  c_eval->add_flag("--json", eval.json, "Machine-readable output");
  c_eval->add_flag("--timing", eval.timing, "Include latency (output is no longer reproducible)");

  cli::ServeOptions serve;
  auto* c_serve = app.add_subcommand("serve", "Run the parking gate service");
  c_serve->add_option("--config,-c", serve.config, "Configuration file");
  c_serve->add_option("--journal", serve.journal, "Journal file")->required();
  c_serve->add_option("--model,-m", serve.model, "Model file")->required();
  auto* pipe = c_serve->add_flag("--pipe", serve.pipe, "Read `<tick> <command>` lines on stdin");
  c_serve->add_option("--listen", serve.listen, "host:port of the TCP service")->excludes(pipe);

  cli::ReportOptions report;
  auto* c_report = app.add_subcommand("report", "Summarize the parking journal");
  c_report->add_option("--journal", report.journal, "Journal file")->required();
  c_report->add_option("--from", report.from, "First day or timestamp (inclusive)");
  c_report->add_option("--to", report.to, "Last day or timestamp (inclusive)");
  c_report->add_flag("--json", report.json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kOk : cli::kUsageError;
  }

  if (*c_train) return cli::cmd_train(train, std::cout, std::cerr);
  if (*c_rec) return cli::cmd_recognize(rec, std::cout, std::cerr);
  if (*c_gen) {
    return cli::guarded(std::cerr, [&] {
      gen.spec.type = parse_type_flag(gen_type);
      gen.spec.palette = gen_palette == "standard" ? synth::Palette::Standard : synth::Palette::Classic;
      gen.spec.distractors = !no_distractors;
      if (tilt_opt->count()) gen.spec.tilt_deg = gen_tilt;
      return cli::cmd_gen(gen, std::cout, std::cerr);
    });
  }
  if (*c_glyphs) return cli::cmd_gen_glyphs(glyphs, std::cout, std::cerr);
  if (*c_font) return cli::cmd_font(font, std::cout, std::cerr);
  if (*c_eval) return cli::cmd_eval(eval, std::cout, std::cerr);
  if (*c_serve) return cli::cmd_serve(serve, std::cin, std::cout, std::cerr);
  if (*c_report) return cli::cmd_report(report, std::cout, std::cerr);
  return cli::kUsageError;
}
