// Copyright 2026 The sgk Authors
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

#include "sgk/sgk.h"

#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "sgk/report.hpp"

struct sgk_config {
  sgk::RunConfig config;
};

struct sgk_report {
  sgk::Report report;
  std::string json;
};

namespace {

thread_local std::string last_error;

sgk_status fail(sgk_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
sgk_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const sgk::Error& e) {
    return fail(static_cast<sgk_status>(sgk::exit_code_for(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SGK_E_NUMERIC, "out of memory");
  } catch (const std::exception& e) {
    return fail(SGK_E_NUMERIC, e.what());
  }
}

}  // namespace

extern "C" {

const char* sgk_version(void) { return sgk::tool_version(); }

const char* sgk_last_error(void) { return last_error.c_str(); }

sgk_status sgk_config_new(sgk_config** out) {
  if (!out) return fail(SGK_E_NULL, "null out pointer");
  return guarded([&] {
    *out = new sgk_config{};
    return SGK_OK;
  });
}

sgk_status sgk_config_load(const char* path, sgk_config** out) {
  if (!out || !path) return fail(SGK_E_NULL, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new sgk_config{sgk::load_config(path)};
    return SGK_OK;
  });
}

sgk_status sgk_config_set(sgk_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(SGK_E_NULL, "null argument");
  return guarded([&] {
    sgk::set_config_value(cfg->config, key, value);
    return SGK_OK;
  });
}

sgk_status sgk_config_get(const sgk_config* cfg, const char* key, char* buf, size_t buf_len) {
  if (!cfg || !key || !buf) return fail(SGK_E_NULL, "null argument");
  return guarded([&] {
    std::istringstream in(sgk::config_text(cfg->config));
    std::string line;
    const std::string prefix = std::string(key) + " = ";
    while (std::getline(in, line)) {
      if (line.rfind(prefix, 0) != 0) continue;
      const std::string value = line.substr(prefix.size());
      if (value.size() + 1 > buf_len) return fail(SGK_E_VALIDATION, "buffer too small for " + std::string(key));
      std::memcpy(buf, value.c_str(), value.size() + 1);
      return SGK_OK;
    }
    return fail(SGK_E_VALIDATION, "unknown key: " + std::string(key));
  });
}

sgk_status sgk_config_validate(const sgk_config* cfg) {
  if (!cfg) return fail(SGK_E_NULL, "null config");
  return guarded([&] {
    sgk::validate(cfg->config);
    return SGK_OK;
  });
}

void sgk_config_free(sgk_config* cfg) { delete cfg; }

sgk_status sgk_run(const sgk_config* cfg, sgk_report** out) {
  if (!cfg || !out) return fail(SGK_E_NULL, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto* rep = new sgk_report{sgk::run(cfg->config), {}};
    rep->json = sgk::report_json(rep->report);
    *out = rep;
    if (rep->report.exit_code != 0) last_error = rep->report.status;
    return SGK_OK;
  });
}

sgk_status sgk_report_write(const sgk_report* rep, const char* dir, const char* format) {
  if (!rep || !dir) return fail(SGK_E_NULL, "null argument");
  return guarded([&] {
    sgk::emit_report(rep->report, dir, format ? format : rep->report.config.report_format);
    return SGK_OK;
  });
}

const char* sgk_report_json(const sgk_report* rep) { return rep ? rep->json.c_str() : ""; }

const char* sgk_report_status(const sgk_report* rep) { return rep ? rep->report.status.c_str() : ""; }

int sgk_report_exit_code(const sgk_report* rep) { return rep ? rep->report.exit_code : SGK_E_NULL; }

void sgk_report_free(sgk_report* rep) { delete rep; }

}  // extern "C"
