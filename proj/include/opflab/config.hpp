#pragma once

// Run configuration: every tunable in one place, JSON-overridable.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>

namespace opflab {

struct ProfileConfig {
  // Daily sinusoid bounds applied to nominal bus loads.
  double daily_peak = 1.2;
  double daily_trough = 0.7;
  double weekend_factor = 0.9;
  double noise_sigma = 0.02;  // lognormal per-bus noise
  int intervals_per_day = 24;  // n_d
  int peak_hour = 15;
  // Gaussian-copula AR(1) coefficient of the renewable availability
  // processes; marginals stay exactly Weibull / lognormal.
  double availability_rho = 0.97;
};

enum class AttentionMode { Learned, Cosine };

struct GnnConfig {
  int channels = 64;           // F_out per ST component
  int cheb_order = 3;          // K
  int temporal_kernel = 3;
  int embedding_dim = 64;      // D_y
  int components_per_branch = 2;
  AttentionMode attention = AttentionMode::Learned;
  double learning_rate = 1e-4;
  bool train = true;           // false = frozen-random ablation
};

struct EnvConfig {
  double gate_eps = 1e-3;              // Eq.(44)-style stability gate
  double line_loss_rate = 0.05;        // r^l
  double current_eps = 1e-6;           // guard added to thermal limits in r3
  double divergence_reward = -100.0;   // reward floor on terminal divergence
  double early_stop_threshold = std::numeric_limits<double>::infinity();
  int episode_length = 100;            // T_n
  int t_recent = 12;                   // T_r
  int t_daily = 7;                     // T_d
  int t_weekly = 4;                    // T_w
  int voltage_window = 5;              // T_td
  // Reward weights. w1 = w1_numerator / C_norm with C_norm the nominal
  // operating-point cost of the case, computed at env construction.
  double w1_numerator = 0.5;
  double w2 = 1.0, w3 = 1.0, w4 = 1.0;
  double w5 = 2.0, w6 = 2.0, w7 = 2.0, w8 = 1.0;
  // Apply the bound-penalty exponential to the literal neighbouring
  // subscripts instead of each term's own raw value.
  bool literal_exp_chain = false;
  int max_reset_attempts = 10;
  ProfileConfig profile;
};

struct DdpgConfig {
  double gamma = 0.99;
  double soft_update_rho = 0.005;
  int buffer_capacity = 100000;
  int batch_size = 64;
  double lr_critic = 1e-3;
  double lr_actor = 1e-4;
  int hidden1 = 256;
  int hidden2 = 256;
  double ou_theta = 0.15;
  double ou_sigma = 0.2;
  double ou_sigma_final = 0.05;
  int ou_decay_steps = 20000;
  std::string optimizer = "adam";  // adam | sgd
  int episodes = 200;
  double max_wall_seconds = 7200.0;
};

struct HeuristicConfig {
  int population = 30;
  int budget_per_step = 240;  // objective evaluations per timestep
  double levy_beta = 1.5;
  // Fraction of the initial population drawn uniformly; the rest is
  // seeded around the previous timestep's action.
  double warm_start_sigma = 0.05;
  double warm_start_uniform_frac = 0.2;
};

struct EvalConfig {
  int n_eval = 100;
  int t_end = 100;
  int monitored_bus = 18;  // 1-based id used for voltage traces
};

struct RunConfig {
  EnvConfig env;
  GnnConfig gnn;
  DdpgConfig ddpg;
  HeuristicConfig heuristic;
  EvalConfig eval;
};

// Defaults overridden by the (optional) JSON file; unknown keys rejected.
RunConfig load_config(const std::filesystem::path& path);
RunConfig default_config();

std::string config_to_json(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace opflab
