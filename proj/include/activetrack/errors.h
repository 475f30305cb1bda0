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

#ifndef ACTIVETRACK_ERRORS_H_
#define ACTIVETRACK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace activetrack {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ACTIVETRACK_DEFINE_ERROR(Name)   \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

// world
ACTIVETRACK_DEFINE_ERROR(MalformedMap);
ACTIVETRACK_DEFINE_ERROR(EmptyFreeSpace);

// estimation
ACTIVETRACK_DEFINE_ERROR(SingularInnovation);

// planners
ACTIVETRACK_DEFINE_ERROR(UnreachableFrontier);
ACTIVETRACK_DEFINE_ERROR(NoReachableGoal);
ACTIVETRACK_DEFINE_ERROR(NoPath);
ACTIVETRACK_DEFINE_ERROR(InvalidEndpoint);

// metrics
ACTIVETRACK_DEFINE_ERROR(SingularCovariance);

// dataset
ACTIVETRACK_DEFINE_ERROR(TooManyTargets);
ACTIVETRACK_DEFINE_ERROR(NonMonotonicTime);
ACTIVETRACK_DEFINE_ERROR(MalformedEpisode);
ACTIVETRACK_DEFINE_ERROR(VersionMismatch);

// harness
ACTIVETRACK_DEFINE_ERROR(BridgeTimeout);
ACTIVETRACK_DEFINE_ERROR(BridgeProtocolError);
ACTIVETRACK_DEFINE_ERROR(InvalidConfig);

#undef ACTIVETRACK_DEFINE_ERROR

}  // namespace activetrack

#endif  // ACTIVETRACK_ERRORS_H_
