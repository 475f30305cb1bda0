// Copyright 2026 The activetrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ACTIVETRACK_REPLAY_H_
#define ACTIVETRACK_REPLAY_H_

#include <filesystem>
#include <string>
#include <vector>

#include "activetrack/dataset.h"

namespace activetrack {

struct ReplayFiles {
  std::filesystem::path trajectory;  // trajectory.svg
  std::filesystem::path entropy;     // entropy.svg
  std::filesystem::path nll;         // nll.svg
  std::filesystem::path rmse;        // rmse.svg
  std::filesystem::path metrics;     // metrics.csv
};

// Renders the plots of an episode into `out_dir`. Every series plot carries
// its raw values in a data-values attribute. FoV wedges are drawn every
// `wedge_every` steps. Throws MalformedEpisode before writing anything when
// the episode has no steps or a step lacks metrics.
ReplayFiles RenderReplay(const EpisodeRecord& episode,
                         const std::filesystem::path& out_dir,
                         int wedge_every = 50);

ReplayFiles ServeReplay(const std::filesystem::path& episode_file,
                        const std::filesystem::path& out_dir);

}  // namespace activetrack

#endif  // ACTIVETRACK_REPLAY_H_
