#include <speckle/checkpoint.hpp>

#include <speckle/text_io.hpp>

#include <json.hpp>

namespace speckle
{

using nlohmann::json;

namespace
{

json matrix_to_json(const Image<double>& m)
{
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r)
  {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c)
      row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Image<double> matrix_from_json(const json& j)
{
  const auto rows = static_cast<Index>(j.size());
  const auto cols = rows ? static_cast<Index>(j.at(0).size()) : 0;
  Image<double> m(rows, cols);
  for (Index r = 0; r < rows; ++r)
  {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Index>(row.size()) != cols)
      throw FormatError("checkpoint: ragged matrix");
    for (Index c = 0; c < cols; ++c)
      m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v)
{
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const json& j)
{
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Index>(values.size()));
}

json layer_to_json(const LayerParams& l)
{
  json kernels = json::array();
  for (const auto& k : l.kernels)
    kernels.push_back(matrix_to_json(k));
  return {{"kernels", kernels},
          {"bn_scale", vector_to_json(l.bnScale)},
          {"bn_shift", vector_to_json(l.bnShift)}};
}

LayerParams layer_from_json(const json& j)
{
  LayerParams l;
  for (const auto& k : j.at("kernels"))
    l.kernels.push_back(matrix_from_json(k));
  l.bnScale = vector_from_json(j.at("bn_scale"));
  l.bnShift = vector_from_json(j.at("bn_shift"));
  l.validate();
  return l;
}

json branch_to_json(const Branch& b)
{
  return {{"layer1", layer_to_json(b.layer1)},
          {"layer2", layer_to_json(b.layer2)}};
}

Branch branch_from_json(const json& j)
{
  Branch b{layer_from_json(j.at("layer1")), layer_from_json(j.at("layer2"))};
  b.validate();
  return b;
}

json config_to_json(const TrainConfig& c)
{
  return {{"beta", c.beta},
          {"learning_rate", c.learningRate},
          {"momentum", c.momentum},
          {"weight_decay", c.weightDecay},
          {"epochs", c.epochs},
          {"batch_size", c.batchSize},
          {"rounds", c.rounds},
          {"bn_epsilon", c.bnEpsilon},
          {"seed", c.seed},
          {"kernel_size", c.kernelSize},
          {"loss", to_string(c.loss)}};
}

TrainConfig config_from_json(const json& j)
{
  TrainConfig c;
  c.beta = j.at("beta").get<double>();
  c.learningRate = j.at("learning_rate").get<double>();
  c.momentum = j.at("momentum").get<double>();
  c.weightDecay = j.at("weight_decay").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batchSize = j.at("batch_size").get<int>();
  c.rounds = j.at("rounds").get<int>();
  c.bnEpsilon = j.at("bn_epsilon").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.kernelSize = j.at("kernel_size").get<Index>();
  c.loss = parse_loss_normalization(j.at("loss").get<std::string>());
  return c;
}

} // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt)
{
  json rounds = json::array();
  for (const auto& s : ckpt.rounds)
    rounds.push_back({{"branch", branch_to_json(s.branch)},
                      {"velocity", branch_to_json(s.velocity)},
                      {"epoch_losses", s.epochLosses},
                      {"rng_state", s.rng.state()},
                      {"steps", s.steps}});
  const json doc = {{"format", kCheckpointFormat},
                    {"version", kCheckpointVersion},
                    {"config", config_to_json(ckpt.config)},
                    {"rounds", rounds}};
  return doc.dump(1) + "\n";
}

Checkpoint parse_checkpoint(std::string_view text)
{
  json doc;
  try
  {
    doc = json::parse(text);
  }
  catch (const json::exception& e)
  {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }

  try
  {
    if (doc.at("format").get<std::string>() != kCheckpointFormat)
      throw FormatError("checkpoint: unknown format tag");
    if (doc.at("version").get<int>() != kCheckpointVersion)
      throw FormatError("checkpoint: unsupported version");

    Checkpoint ckpt;
    ckpt.config = config_from_json(doc.at("config"));
    for (const auto& r : doc.at("rounds"))
    {
      TrainState s;
      s.branch = branch_from_json(r.at("branch"));
      s.velocity = branch_from_json(r.at("velocity"));
      s.epochLosses = r.at("epoch_losses").get<std::vector<double>>();
      s.rng.set_state(r.at("rng_state").get<std::string>());
      s.steps = r.at("steps").get<std::uint64_t>();
      ckpt.rounds.push_back(std::move(s));
    }
    return ckpt;
  }
  catch (const json::exception& e)
  {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  catch (const ShapeError& e)
  {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path)
{
  write_file_atomic(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path)
{
  return parse_checkpoint(read_text_file(path));
}

} // namespace speckle
