// Copyright 2026 The Chaoscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <json.hpp>

#include "chaoscope/boundary.hpp"
#include "chaoscope/error.hpp"
#include "chaoscope/store.hpp"

namespace chaoscope {

using Json = nlohmann::json;

Json to_json(const InitRegion& r);
InitRegion region_from_json(const Json& j);

Json to_json(const BoxcountResult& r);
BoxcountResult boxcount_from_json(const Json& j);

Json to_json(const FdimResult& r);
FdimResult fdim_from_json(const Json& j);

Json to_json(const RunManifest& m);
RunManifest manifest_from_json(const Json& j);

// Throws Error(kValidation) naming the key when a field is missing or has
// the wrong type.
template <typename T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(Errc::kValidation, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::kValidation, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace chaoscope
