#pragma once

#include "run_config.hpp"

namespace dynsbm::cli {

int cmd_generate(const RunConfig& cfg);
int cmd_track(const RunConfig& cfg);
int cmd_fit(const RunConfig& cfg);
int cmd_predict(const RunConfig& cfg);
int cmd_eval_roc(const RunConfig& cfg);

}  // namespace dynsbm::cli
