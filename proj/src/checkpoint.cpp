#include "scplan/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace scplan {

namespace {

using nlohmann::json;

json to_json_vector(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd from_json_vector(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json mlp_json(const Mlp& m) {
  return {{"sizes", m.sizes()}, {"activation", activation_name(m.activation())}, {"parameters", to_json_vector(m.parameters())}};
}

Mlp mlp_from_json(const json& j) {
  Mlp m(j.at("sizes").get<std::vector<int>>(), parse_activation(j.at("activation").get<std::string>()));
  const Eigen::VectorXd p = from_json_vector(j.at("parameters"));
  if (p.size() != m.num_parameters()) throw CheckpointError("network parameter count does not match its sizes");
  m.parameters() = p;
  return m;
}

}  // namespace

std::string checkpoint_to_json(const PolicyBundle& b) {
  const PpoHyperparams& hp = b.hp;
  json doc;
  doc["format"] = "scplan-policy";
  doc["version"] = kCheckpointVersion;
  doc["hyperparams"] = {
      {"n_steps", hp.n_steps},
      {"n_epochs", hp.n_epochs},
      {"batch_size", hp.batch_size},
      {"vf_coef", hp.vf_coef},
      {"clip_range", hp.clip_range},
      {"gae_lambda", hp.gae_lambda},
      {"gamma", hp.gamma},
      {"hidden", hp.hidden},
      {"lr_schedule", hp.lr_schedule == LrSchedule::constant ? "constant" : "linear"},
      {"learning_rate", hp.learning_rate},
      {"activation", activation_name(hp.activation)},
      {"max_grad_norm", hp.max_grad_norm},
      {"n_actors", hp.n_actors},
      {"ent_coef", hp.ent_coef},
      {"normalize_advantage", hp.normalize_advantage},
  };
  doc["actor"] = mlp_json(b.actor);
  doc["log_std"] = to_json_vector(b.log_std);
  doc["critic"] = mlp_json(b.critic);
  doc["optimizer"] = {{"m", to_json_vector(b.optimizer.m)},
                      {"v", to_json_vector(b.optimizer.v)},
                      {"step", b.optimizer.step},
                      {"beta1", b.optimizer.beta1},
                      {"beta2", b.optimizer.beta2},
                      {"eps", b.optimizer.eps}};
  const RunningMoments& mom = b.normalizer.moments();
  doc["reward_normalizer"] = {{"mean", mom.mean},
                              {"var", mom.var},
                              {"count", mom.count},
                              {"returns", b.normalizer.returns()},
                              {"gamma", b.normalizer.gamma()},
                              {"clip", b.normalizer.clip()},
                              {"epsilon", b.normalizer.epsilon()}};
  doc["seed"] = b.seed;
  doc["env_steps"] = b.env_steps;
  doc["updates"] = b.updates;
  return doc.dump(1);
}

PolicyBundle checkpoint_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != "scplan-policy") throw CheckpointError("not a policy checkpoint");
    if (doc.at("version").get<int>() != kCheckpointVersion)
      throw CheckpointError("unsupported checkpoint version " + doc.at("version").dump());
    PolicyBundle b;
    const json& h = doc.at("hyperparams");
    PpoHyperparams& hp = b.hp;
    hp.n_steps = h.at("n_steps");
    hp.n_epochs = h.at("n_epochs");
    hp.batch_size = h.at("batch_size");
    hp.vf_coef = h.at("vf_coef");
    hp.clip_range = h.at("clip_range");
    hp.gae_lambda = h.at("gae_lambda");
    hp.gamma = h.at("gamma");
    hp.hidden = h.at("hidden").get<std::vector<int>>();
    hp.lr_schedule = h.at("lr_schedule") == "linear" ? LrSchedule::linear : LrSchedule::constant;
    hp.learning_rate = h.at("learning_rate");
    hp.activation = parse_activation(h.at("activation").get<std::string>());
    hp.max_grad_norm = h.at("max_grad_norm");
    hp.n_actors = h.at("n_actors");
    hp.ent_coef = h.at("ent_coef");
    hp.normalize_advantage = h.at("normalize_advantage");
    b.actor = mlp_from_json(doc.at("actor"));
    b.log_std = from_json_vector(doc.at("log_std"));
    b.critic = mlp_from_json(doc.at("critic"));
    if (b.log_std.size() != b.actor.output_size()) throw CheckpointError("log_std does not match the actor");
    const json& o = doc.at("optimizer");
    b.optimizer.m = from_json_vector(o.at("m"));
    b.optimizer.v = from_json_vector(o.at("v"));
    b.optimizer.step = o.at("step");
    b.optimizer.beta1 = o.at("beta1");
    b.optimizer.beta2 = o.at("beta2");
    b.optimizer.eps = o.at("eps");
    const json& r = doc.at("reward_normalizer");
    const auto returns = r.at("returns").get<std::vector<double>>();
    b.normalizer = RewardNormalizer(static_cast<int>(returns.size()), r.at("gamma"), r.at("clip"), r.at("epsilon"));
    b.normalizer.restore({r.at("mean"), r.at("var"), r.at("count")}, returns);
    b.seed = doc.at("seed");
    b.env_steps = doc.at("env_steps");
    b.updates = doc.at("updates");
    if (!b.finite()) throw CheckpointError("checkpoint holds non-finite parameters");
    return b;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, target);
}

void save_checkpoint(const PolicyBundle& bundle, const std::string& path) {
  write_file_atomic(path, checkpoint_to_json(bundle));
}

PolicyBundle load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace scplan
