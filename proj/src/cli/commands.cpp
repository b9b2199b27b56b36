#include "command.hpp"

#include <speckle/analysis.hpp>
#include <speckle/cgi.hpp>
#include <speckle/checkpoint.hpp>
#include <speckle/dataset.hpp>
#include <speckle/image_io.hpp>
#include <speckle/net.hpp>
#include <speckle/synthesis.hpp>
#include <speckle/text_io.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <iomanip>
#include <sstream>
#include <thread>

namespace speckle::cli
{

namespace
{

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string optional_field(const std::optional<double>& v)
{
  return v ? format_double(*v) : std::string{};
}

json optional_json(const std::optional<double>& v)
{
  return v ? json(*v) : json(nullptr);
}

/// Resolved settings minus the output directory, so a rerun elsewhere
/// reproduces the same files.
RunConfig rerun_config(const Settings& s)
{
  RunConfig cfg = s.values();
  cfg.erase("output");
  return cfg;
}

/// Creates the output directory and records the resolved settings.
void prepare_output(const Settings& s, const Context& ctx)
{
  fs::create_directories(ctx.outputDir);
  write_file_atomic(ctx.outputDir / "resolved.cfg", format_run_config(rerun_config(s)));
}

class Manifest
{
public:
  Manifest(const std::string& command, const Settings& s, const Context& ctx) :
    mDir(ctx.outputDir), mStart(Clock::now())
  {
    mDoc["format"] = "speckle-run-manifest";
    mDoc["version"] = 1;
    mDoc["command"] = command;
    mDoc["config"] = rerun_config(s);
    mDoc["output_dir"] = ctx.outputDir.string();
    mDoc["seeds"] = json::object();
    mDoc["inputs"] = json::object();
    mDoc["outputs"] = json::object();
    mDoc["timings"] = json::object();
  }

  json& operator[](const char* key) { return mDoc[key]; }

  void seed(const std::string& name, std::uint64_t value)
  {
    mDoc["seeds"][name] = value;
  }

  void input(const fs::path& path)
  {
    mDoc["inputs"][path.string()] = sha256_file(path);
  }

  void output(const std::string& relative)
  {
    mDoc["outputs"][relative] = sha256_file(mDir / relative);
  }

  void timing(const std::string& name, double seconds)
  {
    mDoc["timings"][name] = seconds;
  }

  void write()
  {
    output("resolved.cfg");
    timing("total_seconds", seconds_since(mStart));
    write_file_atomic(mDir / "manifest.json", mDoc.dump(2) + "\n");
  }

private:
  fs::path mDir;
  Clock::time_point mStart;
  json mDoc;
};

void write_csv(const fs::path& path,
               const std::vector<std::vector<std::string>>& rows)
{
  std::ostringstream os;
  CsvWriter csv(os);
  for (const auto& r : rows)
    csv.row(r);
  write_file_atomic(path, os.str());
}

// --- pattern directories ----------------------------------------------------

std::string pattern_file_name(std::size_t index, std::size_t total)
{
  std::size_t digits = 4;
  for (std::size_t n = total > 0 ? total - 1 : 0; n >= 10000; n /= 10)
    ++digits;
  std::ostringstream os;
  os << "pattern_" << std::setw(static_cast<int>(digits)) << std::setfill('0')
     << index << ".pgm";
  return os.str();
}

/// A train output directory is accepted in place of its patterns/ folder.
fs::path resolve_pattern_dir(const fs::path& dir)
{
  if (fs::is_directory(dir / "patterns"))
    return dir / "patterns";
  return dir;
}

PatternStack load_patterns(const fs::path& requested, Manifest& manifest)
{
  const fs::path dir = resolve_pattern_dir(requested);
  if (!fs::is_directory(dir))
    throw FormatError("pattern directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
  {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("pattern_") &&
        name.ends_with(".pgm"))
      files.push_back(entry.path());
  }
  if (files.empty())
    throw FormatError("no pattern_*.pgm files in " + dir.string());
  std::sort(files.begin(), files.end());

  std::vector<Pattern> patterns;
  patterns.reserve(files.size());
  for (const auto& f : files)
  {
    patterns.push_back(read_pattern_image(f));
    manifest.input(f);
  }
  return PatternStack(std::move(patterns));
}

void write_patterns(const PatternStack& stack, const fs::path& outputDir,
                    const std::string& subdir, Manifest& manifest)
{
  fs::create_directories(outputDir / subdir);
  for (std::size_t i = 0; i < stack.size(); ++i)
  {
    const std::string rel = subdir + "/" + pattern_file_name(i, stack.size());
    write_pattern_image(stack[i], outputDir / rel, Depth::Sixteen);
    manifest.output(rel);
  }
}

/// Maps a signed image to [0, 1] for export; the map is recorded.
Pattern apply_map(const Pattern& p, const AffineMap& map)
{
  return ((p.array() - map.offset) * map.scale).cwiseMax(0.0).cwiseMin(1.0);
}

json map_json(const AffineMap& map)
{
  return {{"offset", map.offset}, {"scale", map.scale},
          {"stored", "(value - offset) * scale"}};
}

// --- objects ----------------------------------------------------------------

ObjectDataset load_training_objects(const Settings& s, Index grid,
                                    Manifest& manifest)
{
  const std::string& source = s.text("dataset");
  const auto count = static_cast<std::size_t>(s.integer("dataset_count", 0));
  if (source == "builtin")
    return builtin_objects(grid);
  if (source == "glyphs")
  {
    if (count == 0)
      s.reject("dataset_count", "glyph datasets need a positive count");
    return glyph_objects(grid, count, s.unsigned_integer("dataset_seed"));
  }

  const fs::path images(source);
  const fs::path labels(s.text("dataset_labels"));
  manifest.input(images);
  if (!labels.empty())
    manifest.input(labels);
  return load_idx_dataset(images, grid, s.real("threshold"),
                          static_cast<std::size_t>(s.integer("dataset_offset", 0)),
                          count, labels);
}

ObjectImage load_object(const std::string& source, Index rows, Index cols,
                        double threshold, Manifest& manifest)
{
  const auto names = builtin_names();
  if (std::find(names.begin(), names.end(), source) != names.end())
  {
    if (rows != cols)
      throw ShapeError("builtin objects are square; patterns are " +
                       std::to_string(rows) + "x" + std::to_string(cols));
    return builtin_object(source, rows);
  }
  const fs::path path(source);
  manifest.input(path);
  const Pattern raw = read_pattern_image(path);
  if (raw.rows() != rows || raw.cols() != cols)
    throw ShapeError("object " + path.string() + " is " + std::to_string(raw.rows()) +
                     "x" + std::to_string(raw.cols()) + "; patterns are " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  return ObjectImage((raw.array() >= threshold).cast<double>().matrix(),
                     path.filename().string());
}

// --- shared option groups ---------------------------------------------------

std::vector<OptionDef> train_options()
{
  return {
      {"grid", "32", "pattern side length in pixels"},
      {"initial", "", "initial pattern file (pink noise when empty)"},
      {"init_seed", "7", "seed of the synthesized initial pattern"},
      {"dataset", "builtin", "builtin, glyphs, or an IDX image file"},
      {"dataset_labels", "", "optional IDX label file"},
      {"dataset_offset", "0", "first IDX image to load"},
      {"dataset_count", "200", "objects to load (0 = all IDX images)"},
      {"dataset_seed", "1", "seed of the glyph dataset"},
      {"threshold", "0.5", "binarization threshold"},
      {"beta", "0.01", "sampling ratio, patterns per pixel"},
      {"learning_rate", "0.01", "SGD step size"},
      {"momentum", "0.9", "SGD momentum in (0, 1)"},
      {"weight_decay", "0.001", "L2 weight decay"},
      {"epochs", "200", "epochs per round"},
      {"batch_size", "32", "objects per step"},
      {"rounds", "3", "training rounds"},
      {"bn_epsilon", "1e-05", "normalization epsilon"},
      {"seed", "0", "training seed"},
      {"kernel_size", "10", "kernel side length"},
      {"loss", "deviation", "loss normalization: deviation or object_mean"},
  };
}

TrainConfig train_config(const Settings& s)
{
  TrainConfig cfg;
  cfg.beta = s.positive_real("beta");
  if (cfg.beta > 1.0)
    s.reject("beta", "must not exceed 1");
  cfg.learningRate = s.positive_real("learning_rate");
  cfg.momentum = s.real("momentum");
  cfg.weightDecay = s.real("weight_decay");
  cfg.epochs = static_cast<int>(s.integer("epochs", 1));
  cfg.batchSize = static_cast<int>(s.integer("batch_size", 1));
  cfg.rounds = static_cast<int>(s.integer("rounds", 1));
  cfg.bnEpsilon = s.positive_real("bn_epsilon");
  cfg.seed = s.unsigned_integer("seed");
  cfg.kernelSize = s.integer("kernel_size", 1);
  try
  {
    cfg.loss = parse_loss_normalization(s.text("loss"));
  }
  catch (const InvalidArgument& e)
  {
    s.reject("loss", e.what());
  }
  try
  {
    cfg.validate();
  }
  catch (const InvalidArgument& e)
  {
    throw UsageError(e.what());
  }
  const double threshold = s.real("threshold");
  if (!(threshold > 0.0 && threshold <= 1.0))
    s.reject("threshold", "must lie in (0, 1]");
  return cfg;
}

Pattern initial_pattern(const Settings& s, Index grid, Manifest& manifest)
{
  const std::string& path = s.text("initial");
  if (path.empty())
  {
    SynthesisSpec spec;
    spec.width = grid;
    spec.height = grid;
    spec.seed = s.unsigned_integer("init_seed");
    spec.kind = SynthesisKind::Pink;
    manifest.seed("init_seed", spec.seed);
    return synth_pink(spec);
  }
  manifest.input(path);
  Pattern p = read_pattern_image(path);
  if (p.rows() != grid || p.cols() != grid)
    throw ShapeError("initial pattern is " + std::to_string(p.rows()) + "x" +
                     std::to_string(p.cols()) + " but grid is " +
                     std::to_string(grid) + "x" + std::to_string(grid));
  return p;
}

json loss_curves(const PipelineResult& res)
{
  json curves = json::array();
  for (const auto& r : res.rounds)
    curves.push_back(r.state.epochLosses);
  return curves;
}

void record_round_seeds(Manifest& manifest, const TrainConfig& cfg,
                        const std::string& prefix = {})
{
  manifest.seed(prefix + "seed", cfg.seed);
  for (int r = 0; r < cfg.rounds; ++r)
  {
    const auto ur = static_cast<std::uint64_t>(r);
    const std::string tag = prefix + "round_" + std::to_string(r + 1);
    manifest.seed(tag + "_init", derive_seed(cfg.seed, 2 * ur + 1));
    manifest.seed(tag + "_shuffle", derive_seed(cfg.seed, 2 * ur + 2));
  }
}

// --- synth ------------------------------------------------------------------

void run_synth(const Settings& s, Context& ctx)
{
  SynthesisSpec spec;
  try
  {
    spec.kind = parse_synthesis_kind(s.text("kind"));
  }
  catch (const InvalidArgument& e)
  {
    s.reject("kind", e.what());
  }
  spec.width = s.integer("width", 1);
  spec.height = s.integer("height", 1);
  spec.seed = s.unsigned_integer("seed");
  spec.spectralExponent = s.real("alpha");
  spec.grainSize = s.positive_real("grain");
  const long long bits = s.integer("depth", 8);
  if (bits != 8 && bits != 16)
    s.reject("depth", "must be 8 or 16");
  const Depth depth = bits == 8 ? Depth::Eight : Depth::Sixteen;

  prepare_output(s, ctx);
  Manifest manifest("synth", s, ctx);
  manifest.seed("seed", spec.seed);

  const Pattern p = synthesize(spec);
  // Rayleigh intensities are unbounded; scale by the maximum.
  const AffineMap map{0.0, spec.kind == SynthesisKind::Pink ? 1.0
                                                             : 1.0 / p.maxCoeff()};
  write_pattern_image(apply_map(p, map), ctx.outputDir / "pattern.pgm", depth);
  manifest.output("pattern.pgm");
  manifest["affine_map"] = map_json(map);
  manifest["alpha"] = spec.spectralExponent;
  manifest.write();
  ctx.out << "wrote " << (ctx.outputDir / "pattern.pgm").string() << "\n";
}

// --- train ------------------------------------------------------------------

void run_train(const Settings& s, Context& ctx)
{
  const Index grid = s.integer("grid", 1);
  const TrainConfig cfg = train_config(s);

  prepare_output(s, ctx);
  Manifest manifest("train", s, ctx);
  const Pattern initial = initial_pattern(s, grid, manifest);
  const ObjectDataset data = load_training_objects(s, grid, manifest);
  manifest["dataset"] = {{"provenance", data.provenance},
                         {"objects", data.size()}};
  manifest.seed("dataset_seed", s.unsigned_integer("dataset_seed"));
  record_round_seeds(manifest, cfg);

  const auto start = Clock::now();
  const PipelineResult res = train_pipeline(
      initial, data.objects, cfg, [&](std::size_t round, int epoch, double loss) {
        if (epoch == cfg.epochs)
          ctx.out << "round " << round + 1 << " finished, loss " << loss << "\n";
      });
  manifest.timing("train_seconds", seconds_since(start));

  write_patterns(res.exported, ctx.outputDir, "patterns", manifest);

  Checkpoint ckpt{cfg, {}};
  for (const auto& r : res.rounds)
    ckpt.rounds.push_back(r.state);
  save_checkpoint(ckpt, ctx.outputDir / "checkpoint.json");
  manifest.output("checkpoint.json");

  std::vector<std::vector<std::string>> rows{{"round", "epoch", "loss"}};
  for (std::size_t r = 0; r < res.rounds.size(); ++r)
  {
    const auto& losses = res.rounds[r].state.epochLosses;
    for (std::size_t e = 0; e < losses.size(); ++e)
      rows.push_back({std::to_string(r + 1), std::to_string(e + 1),
                      format_double(losses[e])});
  }
  write_csv(ctx.outputDir / "loss.csv", rows);
  manifest.output("loss.csv");

  manifest["pattern_count"] = res.exported.size();
  manifest["loss_curves"] = loss_curves(res);
  manifest.write();
  ctx.out << "wrote " << res.exported.size() << " patterns to "
          << (ctx.outputDir / "patterns").string() << "\n";
}

// --- simulate ---------------------------------------------------------------

void run_simulate(const Settings& s, Context& ctx)
{
  const std::string& patternDir = s.text("patterns");
  if (patternDir.empty())
    s.reject("patterns", "a pattern directory is required");
  const double threshold = s.real("threshold");
  if (!(threshold > 0.0 && threshold <= 1.0))
    s.reject("threshold", "must lie in (0, 1]");
  const std::optional<double> snr = s.optional_real("snr_db");
  const std::uint64_t noiseSeed = s.unsigned_integer("noise_seed");

  prepare_output(s, ctx);
  Manifest manifest("simulate", s, ctx);
  const PatternStack stack = load_patterns(patternDir, manifest);
  const ObjectImage obj =
      load_object(s.text("object"), stack.rows(), stack.cols(), threshold, manifest);

  std::optional<NoiseSpec> noise;
  if (snr)
  {
    noise = NoiseSpec{*snr, noiseSeed, NoiseModel::AmbientUniform};
    manifest.seed("noise_seed", noiseSeed);
  }
  const Reconstruction recon = simulate(stack, obj, noise);
  const QualityReport q = quality_report(recon, obj);

  const AffineMap map = full_range_map(recon.g);
  write_pattern_image(apply_map(recon.g, map), ctx.outputDir / "recon.pgm",
                      Depth::Sixteen);
  manifest.output("recon.pgm");
  manifest["affine_map"] = map_json(map);

  std::string signal, background, ratio;
  if (snr)
  {
    const NoiseLevels lv = noise_levels(stack, obj, *snr);
    signal = format_double(lv.signal);
    background = format_double(lv.background);
    ratio = format_double(lv.background / lv.signal);
    manifest["noise"] = {{"model", "ambient-uniform"},
                         {"snr_db", *snr},
                         {"signal_level", lv.signal},
                         {"background_level", lv.background},
                         {"background_to_signal", lv.background / lv.signal},
                         {"ambient_mean", lv.ambientMean}};
  }

  write_csv(ctx.outputDir / "metrics.csv",
            {{"object", "patterns", "snr_db", "mse", "cnr", "pearson",
              "pearson_degenerate", "snr_measured_db", "signal_level",
              "background_level", "background_to_signal"},
             {obj.name(), std::to_string(stack.size()),
              snr ? format_double(*snr) : "none", optional_field(q.mse),
              optional_field(q.cnr), format_double(q.pearson),
              q.pearsonDegenerate ? "1" : "0", optional_field(q.snrMeasuredDb),
              signal, background, ratio}});
  manifest.output("metrics.csv");
  manifest["metrics"] = {{"mse", optional_json(q.mse)},
                         {"cnr", optional_json(q.cnr)},
                         {"pearson", q.pearson},
                         {"pearson_degenerate", q.pearsonDegenerate},
                         {"snr_measured_db", optional_json(q.snrMeasuredDb)}};
  manifest.write();
  ctx.out << "pearson " << q.pearson << "\n";
}

// --- analyze ----------------------------------------------------------------

void run_analyze(const Settings& s, Context& ctx)
{
  const std::string& patternDir = s.text("patterns");
  if (patternDir.empty())
    s.reject("patterns", "a pattern directory is required");

  prepare_output(s, ctx);
  Manifest manifest("analyze", s, ctx);
  const PatternStack stack = load_patterns(patternDir, manifest);
  if (stack.size() < 2)
    throw InvalidArgument("analysis needs at least two patterns, found " +
                          std::to_string(stack.size()));

  const CorrelationMap raw = gamma2(stack);
  double meanSquare = 0.0;
  for (const auto& p : stack)
    meanSquare += p.squaredNorm() / double(p.size() * Index(stack.size()));
  if (raw.peak() <= 1e-12 * meanSquare)
    throw DegenerateLoss("degenerate correlation peak: the patterns do not "
                         "fluctuate across the stack");
  CorrelationMap normalized;
  double width = 0.0;
  try
  {
    normalized = peak_normalized(raw);
    width = correlation_width(raw);
  }
  catch (const InvalidArgument& e)
  {
    throw DegenerateLoss(std::string("degenerate correlation peak: ") + e.what());
  }

  const AffineMap gMap = full_range_map(normalized.values);
  write_pattern_image(apply_map(normalized.values, gMap),
                      ctx.outputDir / "gamma2.pgm", Depth::Sixteen);
  manifest.output("gamma2.pgm");

  const SpectrumMap spectrum = fourier_spectrum(stack);
  const AffineMap sMap = full_range_map(spectrum.magnitude);
  write_pattern_image(apply_map(spectrum.magnitude, sMap),
                      ctx.outputDir / "spectrum.pgm", Depth::Sixteen);
  manifest.output("spectrum.pgm");

  const RadialProfile prof = radial_profile(
      normalized.values, normalized.maxShiftRows, normalized.maxShiftCols);
  std::vector<std::vector<std::string>> rows{{"radius", "value", "count"}};
  for (std::size_t i = 0; i < prof.radius.size(); ++i)
    rows.push_back({format_double(prof.radius[i]), format_double(prof.value[i]),
                    std::to_string(prof.count[i])});
  write_csv(ctx.outputDir / "radial.csv", rows);
  manifest.output("radial.csv");

  write_csv(ctx.outputDir / "width.csv",
            {{"patterns", "correlation_width"},
             {std::to_string(stack.size()), format_double(width)}});
  manifest.output("width.csv");

  manifest["correlation_width"] = width;
  manifest["gamma2_map"] = map_json(gMap);
  manifest["spectrum_map"] = map_json(sMap);
  manifest.write();
  ctx.out << "correlation width " << width << " px\n";
}

// --- benchmark --------------------------------------------------------------

/// Runs fn(0) .. fn(count - 1) on at most `workers` threads. The first
/// failure in index order is rethrown after all jobs finish.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn fn)
{
  if (count == 0)
    return;
  workers = std::clamp<std::size_t>(workers, 1, count);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++)
    {
      try
      {
        fn(i);
      }
      catch (...)
      {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w)
      pool.emplace_back(work);
    work();
  }
  for (const auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

struct Cell
{
  std::string family;
  double beta = 0.0;
  PatternStack stack;
  json losses;
};

struct Row
{
  std::size_t cell = 0;
  std::optional<double> snr;
  std::size_t object = 0;
  QualityReport report;
};

std::string snr_text(const std::optional<double>& snr)
{
  return snr ? format_double(*snr) : "none";
}

void run_benchmark(const Settings& s, Context& ctx)
{
  const Index grid = s.integer("grid", 16);
  const TrainConfig base = train_config(s);

  std::vector<double> betas;
  for (const auto& b : s.list("betas"))
  {
    Settings one({{"betas", b}});
    const double v = one.positive_real("betas");
    if (v > 1.0)
      s.reject("betas", "every value must lie in (0, 1]");
    betas.push_back(v);
  }
  std::vector<std::optional<double>> snrs;
  for (const auto& v : s.list("snr_db"))
    snrs.push_back(Settings({{"snr_db", v}}).optional_real("snr_db"));
  const std::vector<std::string> families = s.list("families");
  for (const auto& f : families)
    if (f != "pink" && f != "rayleigh" && f != "trained")
      s.reject("families", "unknown family '" + f + "'");
  std::vector<std::string> objectNames = s.list("objects");
  if (objectNames.size() == 1 && objectNames.front() == "builtin")
    objectNames = builtin_names();
  const auto known = builtin_names();
  for (const auto& n : objectNames)
    if (std::find(known.begin(), known.end(), n) == known.end())
      s.reject("objects", "unknown builtin object '" + n + "'");
  if (betas.empty() || snrs.empty() || families.empty() || objectNames.empty())
    throw UsageError("benchmark grid is empty: betas, snr_db, families and "
                     "objects all need at least one entry");

  const std::uint64_t patternSeed = s.unsigned_integer("pattern_seed");
  const std::uint64_t noiseSeed = s.unsigned_integer("noise_seed");
  const double alpha = s.real("alpha");
  const double grain = s.positive_real("grain");
  std::size_t workers = static_cast<std::size_t>(s.integer("workers", 0));
  if (workers == 0)
    workers = std::max(1u, std::thread::hardware_concurrency());

  prepare_output(s, ctx);
  Manifest manifest("benchmark", s, ctx);
  manifest.seed("pattern_seed", patternSeed);
  manifest.seed("noise_seed", noiseSeed);

  std::vector<ObjectImage> objects;
  for (const auto& n : objectNames)
    objects.push_back(builtin_object(n, grid));

  const bool needTraining =
      std::find(families.begin(), families.end(), "trained") != families.end();
  Pattern initial;
  ObjectDataset training;
  if (needTraining)
  {
    initial = initial_pattern(s, grid, manifest);
    training = load_training_objects(s, grid, manifest);
    manifest.seed("dataset_seed", s.unsigned_integer("dataset_seed"));
    record_round_seeds(manifest, base);
  }

  std::vector<Cell> cells;
  for (const auto& f : families)
    for (double b : betas)
      cells.push_back({f, b, {}, nullptr});

  auto start = Clock::now();
  parallel_for(cells.size(), workers, [&](std::size_t i) {
    Cell& cell = cells[i];
    const std::size_t n = pattern_count(cell.beta, static_cast<std::size_t>(grid * grid));
    if (cell.family == "trained")
    {
      TrainConfig cfg = base;
      cfg.beta = cell.beta;
      const PipelineResult res = train_pipeline(initial, training.objects, cfg);
      cell.stack = res.exported;
      cell.losses = loss_curves(res);
      return;
    }
    std::vector<Pattern> ps;
    ps.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
    {
      SynthesisSpec spec;
      spec.width = grid;
      spec.height = grid;
      spec.seed = derive_seed(patternSeed, k);
      spec.kind = cell.family == "pink" ? SynthesisKind::Pink : SynthesisKind::Rayleigh;
      spec.spectralExponent = alpha;
      spec.grainSize = grain;
      ps.push_back(synthesize(spec));
    }
    cell.stack = PatternStack(std::move(ps));
  });
  manifest.timing("patterns_seconds", seconds_since(start));

  std::vector<Row> rows;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (const auto& snr : snrs)
      for (std::size_t o = 0; o < objects.size(); ++o)
        rows.push_back({c, snr, o, {}});

  start = Clock::now();
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    Row& row = rows[i];
    std::optional<NoiseSpec> noise;
    if (row.snr)
      noise = NoiseSpec{*row.snr, noiseSeed, NoiseModel::AmbientUniform};
    const ObjectImage& obj = objects[row.object];
    row.report = quality_report(simulate(cells[row.cell].stack, obj, noise), obj);
  });
  manifest.timing("evaluate_seconds", seconds_since(start));

  std::vector<std::vector<std::string>> table{
      {"family", "beta", "patterns", "snr_db", "object", "mse", "cnr",
       "pearson", "pearson_degenerate", "snr_measured_db"}};
  for (const auto& r : rows)
  {
    const Cell& cell = cells[r.cell];
    table.push_back({cell.family, format_double(cell.beta),
                     std::to_string(cell.stack.size()), snr_text(r.snr),
                     objects[r.object].name(), optional_field(r.report.mse),
                     optional_field(r.report.cnr), format_double(r.report.pearson),
                     r.report.pearsonDegenerate ? "1" : "0",
                     optional_field(r.report.snrMeasuredDb)});
  }
  write_csv(ctx.outputDir / "benchmark.csv", table);
  manifest.output("benchmark.csv");

  std::vector<std::vector<std::string>> summary{
      {"family", "beta", "snr_db", "objects", "mean_pearson", "mean_cnr",
       "mean_mse"}};
  ctx.out << std::left << std::setw(10) << "family" << std::setw(8) << "beta"
          << std::setw(8) << "snr_db" << "mean_pearson\n";
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (const auto& snr : snrs)
    {
      double pSum = 0.0, cSum = 0.0, mSum = 0.0;
      std::size_t n = 0, cn = 0, mn = 0;
      for (const auto& r : rows)
      {
        if (r.cell != c || r.snr != snr)
          continue;
        pSum += r.report.pearson;
        ++n;
        if (r.report.cnr)
        {
          cSum += *r.report.cnr;
          ++cn;
        }
        if (r.report.mse)
        {
          mSum += *r.report.mse;
          ++mn;
        }
      }
      const double meanPearson = pSum / static_cast<double>(n);
      summary.push_back(
          {cells[c].family, format_double(cells[c].beta), snr_text(snr),
           std::to_string(n), format_double(meanPearson),
           cn ? format_double(cSum / static_cast<double>(cn)) : "",
           mn ? format_double(mSum / static_cast<double>(mn)) : ""});
      ctx.out << std::setw(10) << cells[c].family << std::setw(8) << cells[c].beta
              << std::setw(8) << snr_text(snr) << meanPearson << "\n";
    }
  write_csv(ctx.outputDir / "summary.csv", summary);
  manifest.output("summary.csv");

  json curves = json::object();
  for (const auto& cell : cells)
    if (cell.family == "trained")
      curves[format_double(cell.beta)] = cell.losses;
  manifest["loss_curves"] = curves;
  manifest["rows"] = rows.size();
  manifest.write();
}

std::vector<OptionDef> with_output(std::vector<OptionDef> options)
{
  options.push_back({"output", "", "output directory"});
  return options;
}

} // namespace

const std::vector<Command>& commands()
{
  static const std::vector<Command> all = [] {
    std::vector<Command> cmds;
    cmds.push_back({"synth",
                    "Synthesize one pink-noise or Rayleigh speckle pattern",
                    with_output({{"kind", "pink", "pink or rayleigh"},
                                 {"width", "112", "columns"},
                                 {"height", "112", "rows"},
                                 {"seed", "0", "random seed"},
                                 {"alpha", "1", "pink spectral exponent"},
                                 {"grain", "4", "Rayleigh grain size in pixels"},
                                 {"depth", "16", "graymap bit depth, 8 or 16"}}),
                    run_synth});
    cmds.push_back({"train", "Train a pattern stack", with_output(train_options()),
                    run_train});
    cmds.push_back({"simulate", "Reconstruct an object from a pattern stack",
                    with_output({{"patterns", "", "pattern directory"},
                                 {"object", "three_lines",
                                  "builtin object name or graymap file"},
                                 {"threshold", "0.5", "object binarization threshold"},
                                 {"snr_db", "none", "ambient noise SNR in dB"},
                                 {"noise_seed", "0", "noise seed"}}),
                    run_simulate});
    cmds.push_back({"analyze", "Correlation and spectrum of a pattern stack",
                    with_output({{"patterns", "", "pattern directory"}}),
                    run_analyze});

    std::vector<OptionDef> bench = train_options();
    bench.push_back({"betas", "0.03", "comma-separated sampling ratios"});
    bench.push_back({"snr_db", "none", "comma-separated SNRs, none = noiseless"});
    bench.push_back({"families", "pink,trained", "pink, rayleigh and/or trained"});
    bench.push_back({"objects", "builtin", "builtin or comma-separated names"});
    bench.push_back({"pattern_seed", "1000", "seed of synthesized stacks"});
    bench.push_back({"alpha", "1", "pink spectral exponent"});
    bench.push_back({"grain", "4", "Rayleigh grain size in pixels"});
    bench.push_back({"noise_seed", "0", "noise seed"});
    bench.push_back({"workers", "0", "worker threads, 0 = hardware threads"});
    cmds.push_back({"benchmark", "Sweep pattern families, ratios and noise levels",
                    with_output(std::move(bench)), run_benchmark});
    return cmds;
  }();
  return all;
}

} // namespace speckle::cli
