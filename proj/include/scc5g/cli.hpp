#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "scc5g/errors.hpp"

namespace scc5g::cli {

// Workspace layout: users/<id>/ holds per-user key material and the device
// image; db/ holds the public authority export; out/ holds CSV and plots.
// Private key files never leave users/<id>/.

int exit_code_for(ErrorClass cls);

int cmd_enroll(const std::filesystem::path& workspace, const std::string& user_id, unsigned m,
               const std::string& params_name, std::optional<std::uint64_t> seed,
               std::ostream& out, std::ostream& err);

int cmd_init_db(const std::filesystem::path& workspace, std::ostream& out, std::ostream& err);

int cmd_handshake(const std::filesystem::path& workspace, const std::string& initiator_id,
                  const std::string& responder_id, const std::optional<std::string>& adversary,
                  std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

int cmd_simulate(const std::filesystem::path& workspace,
                 const std::optional<std::filesystem::path>& scenario_file,
                 const std::optional<std::filesystem::path>& out_csv,
                 std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

int cmd_report(const std::filesystem::path& workspace,
               const std::optional<std::filesystem::path>& csv_file, std::ostream& out,
               std::ostream& err);

}  // namespace scc5g::cli
