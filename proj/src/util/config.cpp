#include "opflab/config.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace opflab {

namespace {

using nlohmann::json;

json profile_to_json(const ProfileConfig& p) {
  return json{{"daily_peak", p.daily_peak},
              {"daily_trough", p.daily_trough},
              {"weekend_factor", p.weekend_factor},
              {"noise_sigma", p.noise_sigma},
              {"intervals_per_day", p.intervals_per_day},
              {"peak_hour", p.peak_hour},
              {"availability_rho", p.availability_rho}};
}

json to_json_obj(const RunConfig& c) {
  json j;
  j["env"] = {{"gate_eps", c.env.gate_eps},
              {"line_loss_rate", c.env.line_loss_rate},
              {"current_eps", c.env.current_eps},
              {"divergence_reward", c.env.divergence_reward},
              {"early_stop_threshold", c.env.early_stop_threshold},
              {"episode_length", c.env.episode_length},
              {"t_recent", c.env.t_recent},
              {"t_daily", c.env.t_daily},
              {"t_weekly", c.env.t_weekly},
              {"voltage_window", c.env.voltage_window},
              {"w1_numerator", c.env.w1_numerator},
              {"w2", c.env.w2},
              {"w3", c.env.w3},
              {"w4", c.env.w4},
              {"w5", c.env.w5},
              {"w6", c.env.w6},
              {"w7", c.env.w7},
              {"w8", c.env.w8},
              {"literal_exp_chain", c.env.literal_exp_chain},
              {"max_reset_attempts", c.env.max_reset_attempts},
              {"profile", profile_to_json(c.env.profile)}};
  j["gnn"] = {{"channels", c.gnn.channels},
              {"cheb_order", c.gnn.cheb_order},
              {"temporal_kernel", c.gnn.temporal_kernel},
              {"embedding_dim", c.gnn.embedding_dim},
              {"components_per_branch", c.gnn.components_per_branch},
              {"attention", c.gnn.attention == AttentionMode::Learned
                                ? "learned"
                                : "cosine"},
              {"learning_rate", c.gnn.learning_rate},
              {"train", c.gnn.train}};
  j["ddpg"] = {{"gamma", c.ddpg.gamma},
               {"soft_update_rho", c.ddpg.soft_update_rho},
               {"buffer_capacity", c.ddpg.buffer_capacity},
               {"batch_size", c.ddpg.batch_size},
               {"lr_critic", c.ddpg.lr_critic},
               {"lr_actor", c.ddpg.lr_actor},
               {"hidden1", c.ddpg.hidden1},
               {"hidden2", c.ddpg.hidden2},
               {"ou_theta", c.ddpg.ou_theta},
               {"ou_sigma", c.ddpg.ou_sigma},
               {"ou_sigma_final", c.ddpg.ou_sigma_final},
               {"ou_decay_steps", c.ddpg.ou_decay_steps},
               {"optimizer", c.ddpg.optimizer},
               {"episodes", c.ddpg.episodes},
               {"max_wall_seconds", c.ddpg.max_wall_seconds}};
  j["heuristic"] = {{"population", c.heuristic.population},
                    {"budget_per_step", c.heuristic.budget_per_step},
                    {"levy_beta", c.heuristic.levy_beta},
                    {"warm_start_sigma", c.heuristic.warm_start_sigma},
                    {"warm_start_uniform_frac",
                     c.heuristic.warm_start_uniform_frac}};
  j["eval"] = {{"n_eval", c.eval.n_eval},
               {"t_end", c.eval.t_end},
               {"monitored_bus", c.eval.monitored_bus}};
  return j;
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void apply_profile(const json& j, ProfileConfig& p) {
  get_if_present(j, "daily_peak", p.daily_peak);
  get_if_present(j, "daily_trough", p.daily_trough);
  get_if_present(j, "weekend_factor", p.weekend_factor);
  get_if_present(j, "noise_sigma", p.noise_sigma);
  get_if_present(j, "intervals_per_day", p.intervals_per_day);
  get_if_present(j, "peak_hour", p.peak_hour);
  get_if_present(j, "availability_rho", p.availability_rho);
}

void apply_config(const json& j, RunConfig& c) {
  if (j.contains("env")) {
    const auto& e = j.at("env");
    get_if_present(e, "gate_eps", c.env.gate_eps);
    get_if_present(e, "line_loss_rate", c.env.line_loss_rate);
    get_if_present(e, "current_eps", c.env.current_eps);
    get_if_present(e, "divergence_reward", c.env.divergence_reward);
    get_if_present(e, "early_stop_threshold", c.env.early_stop_threshold);
    get_if_present(e, "episode_length", c.env.episode_length);
    get_if_present(e, "t_recent", c.env.t_recent);
    get_if_present(e, "t_daily", c.env.t_daily);
    get_if_present(e, "t_weekly", c.env.t_weekly);
    get_if_present(e, "voltage_window", c.env.voltage_window);
    get_if_present(e, "w1_numerator", c.env.w1_numerator);
    get_if_present(e, "w2", c.env.w2);
    get_if_present(e, "w3", c.env.w3);
    get_if_present(e, "w4", c.env.w4);
    get_if_present(e, "w5", c.env.w5);
    get_if_present(e, "w6", c.env.w6);
    get_if_present(e, "w7", c.env.w7);
    get_if_present(e, "w8", c.env.w8);
    get_if_present(e, "literal_exp_chain", c.env.literal_exp_chain);
    get_if_present(e, "max_reset_attempts", c.env.max_reset_attempts);
    if (e.contains("profile")) apply_profile(e.at("profile"), c.env.profile);
  }
  if (j.contains("gnn")) {
    const auto& g = j.at("gnn");
    get_if_present(g, "channels", c.gnn.channels);
    get_if_present(g, "cheb_order", c.gnn.cheb_order);
    get_if_present(g, "temporal_kernel", c.gnn.temporal_kernel);
    get_if_present(g, "embedding_dim", c.gnn.embedding_dim);
    get_if_present(g, "components_per_branch", c.gnn.components_per_branch);
    if (g.contains("attention")) {
      const std::string a = g.at("attention").get<std::string>();
      if (a == "learned")
        c.gnn.attention = AttentionMode::Learned;
      else if (a == "cosine")
        c.gnn.attention = AttentionMode::Cosine;
      else
        throw std::runtime_error("unknown attention mode: " + a);
    }
    get_if_present(g, "learning_rate", c.gnn.learning_rate);
    get_if_present(g, "train", c.gnn.train);
  }
  if (j.contains("ddpg")) {
    const auto& d = j.at("ddpg");
    get_if_present(d, "gamma", c.ddpg.gamma);
    get_if_present(d, "soft_update_rho", c.ddpg.soft_update_rho);
    get_if_present(d, "buffer_capacity", c.ddpg.buffer_capacity);
    get_if_present(d, "batch_size", c.ddpg.batch_size);
    get_if_present(d, "lr_critic", c.ddpg.lr_critic);
    get_if_present(d, "lr_actor", c.ddpg.lr_actor);
    get_if_present(d, "hidden1", c.ddpg.hidden1);
    get_if_present(d, "hidden2", c.ddpg.hidden2);
    get_if_present(d, "ou_theta", c.ddpg.ou_theta);
    get_if_present(d, "ou_sigma", c.ddpg.ou_sigma);
    get_if_present(d, "ou_sigma_final", c.ddpg.ou_sigma_final);
    get_if_present(d, "ou_decay_steps", c.ddpg.ou_decay_steps);
    get_if_present(d, "optimizer", c.ddpg.optimizer);
    get_if_present(d, "episodes", c.ddpg.episodes);
    get_if_present(d, "max_wall_seconds", c.ddpg.max_wall_seconds);
  }
  if (j.contains("heuristic")) {
    const auto& h = j.at("heuristic");
    get_if_present(h, "population", c.heuristic.population);
    get_if_present(h, "budget_per_step", c.heuristic.budget_per_step);
    get_if_present(h, "levy_beta", c.heuristic.levy_beta);
    get_if_present(h, "warm_start_sigma", c.heuristic.warm_start_sigma);
    get_if_present(h, "warm_start_uniform_frac",
                   c.heuristic.warm_start_uniform_frac);
  }
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    get_if_present(e, "n_eval", c.eval.n_eval);
    get_if_present(e, "t_end", c.eval.t_end);
    get_if_present(e, "monitored_bus", c.eval.monitored_bus);
  }
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig cfg;
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path.string());
  json j = json::parse(is);
  apply_config(j, cfg);
  return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
  return to_json_obj(cfg).dump(2);
}

std::uint64_t config_hash(const RunConfig& cfg) {
  // FNV-1a over the canonical JSON dump.
  const std::string s = to_json_obj(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace opflab
