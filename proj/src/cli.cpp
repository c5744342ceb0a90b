#include "scc5g/cli.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "scc5g/drills.hpp"
#include "scc5g/netsim.hpp"
#include "scc5g/plot.hpp"

namespace scc5g::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint8_t kKemSecretTag = 0x30;
constexpr std::uint8_t kDeviceTag = 0x40;
constexpr unsigned kDefaultSignHeight = 10;

Bytes read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorClass::IoError, "cannot read " + p.string());
  return Bytes(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& p, ByteView data) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorClass::IoError, "cannot write " + p.string());
  f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!f) throw Error(ErrorClass::IoError, "short write to " + p.string());
}

std::string read_text(const fs::path& p) {
  const Bytes b = read_file(p);
  return std::string(b.begin(), b.end());
}

const kem::KemParams& params_by_name(const std::string& name) {
  if (name == "default") return kem::default_params();
  if (name == "toy") return kem::toy_params();
  throw Error(ErrorClass::ConfigError, "unknown parameter profile '" + name + "'");
}

void check_user_id(const std::string& id) {
  if (id.empty() || id.size() > certs::kMaxUserIdLen)
    throw Error(ErrorClass::InvalidArgument, "user id must be 1..64 characters");
  for (char c : id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.')
      throw Error(ErrorClass::InvalidArgument, "user id may use [A-Za-z0-9._-] only");
}

struct StoredUser {
  drills::Actor actor;
  const kem::KemParams* params;
};

fs::path user_dir(const fs::path& ws, const std::string& id) { return ws / "users" / id; }

void save_user(const fs::path& ws, const drills::Actor& actor, const kem::KemParams& p,
               ByteView kem_seed64) {
  const fs::path dir = user_dir(ws, actor.id);
  fs::create_directories(dir);

  Bytes kem_sk;
  kem_sk.push_back(static_cast<std::uint8_t>(kKemSecretTag | p.profile_id));
  append(kem_sk, kem_seed64);
  write_file(dir / "kem.sk", view(kem_sk));
  write_file(dir / "kem.pk", view(actor.kem_pk.encode(p)));

  Bytes sign_sk;
  sign_sk.push_back(sign::kSchemeWm16);
  sign_sk.push_back(static_cast<std::uint8_t>(actor.sign_kp.height));
  append(sign_sk, ByteView(actor.sign_kp.seed.data(), actor.sign_kp.seed.size()));
  append_u32le(sign_sk, actor.sign_kp.next_leaf);
  write_file(dir / "sign.sk", view(sign_sk));
  write_file(dir / "sign.pk", view(actor.sign_kp.public_key));

  Bytes device;
  device.push_back(kDeviceTag);
  device.push_back(static_cast<std::uint8_t>(actor.device.challenge_bits));
  append(device, ByteView(actor.device.device_secret.data(), 32));
  device.push_back(actor.device.tamper_flag ? 1 : 0);
  write_file(dir / "device.bin", view(device));
}

StoredUser load_user(const fs::path& ws, const std::string& id) {
  const fs::path dir = user_dir(ws, id);
  if (!fs::exists(dir)) throw Error(ErrorClass::UnknownUser, "user not enrolled: " + id);

  StoredUser u;
  u.actor.id = id;

  const Bytes kem_sk = read_file(dir / "kem.sk");
  if (kem_sk.size() != 65 || (kem_sk[0] & 0xf0) != kKemSecretTag)
    throw Error(ErrorClass::CorruptEncoding, "bad KEM secret file for " + id);
  u.params = kem::params_for_profile(kem_sk[0] & 0x0f);
  if (u.params == nullptr) throw Error(ErrorClass::CorruptEncoding, "unknown KEM profile for " + id);
  auto [pk, sk] = kem::keygen(ByteView(kem_sk).subspan(1), *u.params);
  u.actor.kem_pk = pk;
  u.actor.kem_sk = sk;

  const Bytes sign_sk = read_file(dir / "sign.sk");
  if (sign_sk.size() != 38 || sign_sk[0] != sign::kSchemeWm16)
    throw Error(ErrorClass::CorruptEncoding, "bad signing key file for " + id);
  u.actor.sign_kp = sign::sign_keygen(ByteView(sign_sk).subspan(2, 32), sign_sk[1]);
  u.actor.sign_kp.next_leaf = read_u32le(view(sign_sk), 34);

  const Bytes device = read_file(dir / "device.bin");
  if (device.size() != 35 || device[0] != kDeviceTag)
    throw Error(ErrorClass::CorruptEncoding, "bad device file for " + id);
  u.actor.device = hra::make_device(ByteView(device).subspan(2, 32), device[1]);
  u.actor.device.tamper_flag = device[34] != 0;
  return u;
}

void persist_sign_state(const fs::path& ws, const drills::Actor& actor) {
  const fs::path p = user_dir(ws, actor.id) / "sign.sk";
  Bytes sign_sk = read_file(p);
  if (sign_sk.size() != 38) throw Error(ErrorClass::CorruptEncoding, "bad signing key file");
  sign_sk.resize(34);
  append_u32le(sign_sk, actor.sign_kp.next_leaf);
  write_file(p, view(sign_sk));
}

int report_error(std::ostream& err, const Error& e) {
  err << "error[" << error_class_name(e.cls()) << "]: " << e.what() << "\n";
  return exit_code_for(e.cls());
}

std::string key_fingerprint(const Digest32& key) {
  const Digest32 fp = sha256(ByteView(key.data(), key.size()));
  return to_hex(ByteView(fp.data(), 8));
}

}  // namespace

int exit_code_for(ErrorClass cls) {
  switch (cls) {
    case ErrorClass::InvalidArgument:
    case ErrorClass::ConfigError: return 2;
    case ErrorClass::DuplicateUser: return 3;
    case ErrorClass::UnknownUser: return 4;
    case ErrorClass::AuthFailure:
    case ErrorClass::DigestMismatch: return 5;
    case ErrorClass::IoError: return 6;
    case ErrorClass::CorruptEncoding: return 7;
    case ErrorClass::TamperedDevice: return 8;
    case ErrorClass::ExhaustedKey: return 9;
    case ErrorClass::StateViolation: return 10;
  }
  return 1;
}

int cmd_enroll(const fs::path& workspace, const std::string& user_id, unsigned m,
               const std::string& params_name, std::optional<std::uint64_t> seed,
               std::ostream& out, std::ostream& err) {
  try {
    check_user_id(user_id);
    const kem::KemParams& p = params_by_name(params_name);
    if (fs::exists(user_dir(workspace, user_id)))
      throw Error(ErrorClass::DuplicateUser, "user already enrolled: " + user_id);

    Bytes kem_seed(64), sign_seed(32), device_secret(32);
    if (seed) {
      Bytes tag;
      append_u64le(tag, *seed);
      append(tag, view(to_bytes("enroll:")));
      append(tag, view(to_bytes(user_id)));
      Drbg rng((view(tag)));
      rng.fill(kem_seed);
      rng.fill(sign_seed);
      rng.fill(device_secret);
    } else {
      system_random(kem_seed);
      system_random(sign_seed);
      system_random(device_secret);
    }

    drills::Actor actor;
    actor.id = user_id;
    auto [pk, sk] = kem::keygen(view(kem_seed), p);
    actor.kem_pk = pk;
    actor.kem_sk = sk;
    actor.sign_kp = sign::sign_keygen(view(sign_seed), kDefaultSignHeight);
    actor.device = hra::make_device(view(device_secret), m);

    save_user(workspace, actor, p, view(kem_seed));
    const hra::HraImage image = hra::enumerate_image(actor.device, user_id);
    write_file(user_dir(workspace, user_id) / "image.hri", view(image.encode()));

    out << "enrolled " << user_id << ": profile=" << params_name << " m=" << m << " ("
        << image.entries.size() << " image rows), sign capacity "
        << actor.sign_kp.remaining_signatures() << "\n";
    return 0;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

int cmd_init_db(const fs::path& workspace, std::ostream& out, std::ostream& err) {
  try {
    const fs::path users = workspace / "users";
    std::vector<fs::path> image_files;
    if (fs::exists(users))
      for (const auto& entry : fs::directory_iterator(users))
        if (entry.is_directory() && fs::exists(entry.path() / "image.hri"))
          image_files.push_back(entry.path() / "image.hri");
    if (image_files.empty())
      throw Error(ErrorClass::ConfigError, "no enrolled users in " + workspace.string());
    std::sort(image_files.begin(), image_files.end());

    hakf::CertificateDB db;
    for (const fs::path& f : image_files)
      hakf::register_user(db, hra::HraImage::decode(view(read_file(f))));

    fs::create_directories(workspace / "db");
    write_file(workspace / "db" / "certdb.bin", view(db.encode()));
    out << "database built: " << db.user_count() << " users, " << db.row_count() << " rows\n";
    return 0;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

int cmd_handshake(const fs::path& workspace, const std::string& initiator_id,
                  const std::string& responder_id, const std::optional<std::string>& adversary,
                  std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  try {
    StoredUser a = load_user(workspace, initiator_id);
    StoredUser b = load_user(workspace, responder_id);
    if (a.params != b.params)
      throw Error(ErrorClass::ConfigError, "users enrolled under different profiles");

    const fs::path db_file = workspace / "db" / "certdb.bin";
    if (!fs::exists(db_file))
      throw Error(ErrorClass::ConfigError, "certificate database not built; run init-db");
    const hakf::CertificateDB db = hakf::CertificateDB::decode(view(read_file(db_file)));

    std::uint64_t rng_seed;
    if (seed) {
      rng_seed = *seed;
    } else {
      Bytes fresh(8);
      system_random(fresh);
      rng_seed = read_u64le(view(fresh), 0);
    }
    Drbg rng(rng_seed);

    handshake::EndpointConfig init_cfg = drills::endpoint_of(a.actor, a.params, responder_id);
    handshake::EndpointConfig resp_cfg = drills::endpoint_of(b.actor, b.params);

    handshake::ExchangeResult r;
    std::string drill_note;
    if (!adversary) {
      r = handshake::run_local_handshake(init_cfg, resp_cfg, db, rng);
    } else if (*adversary == "spoof") {
      Drbg attacker_rng(rng.next_u64());
      drills::Actor attacker = drills::make_actor("attacker", attacker_rng, *a.params, 4,
                                                  a.actor.device.challenge_bits);
      r = drills::run_spoof_once(attacker, initiator_id, resp_cfg, db, rng, *a.params);
      drill_note = "spoof: attacker presented '" + initiator_id + "' with foreign hardware";
    } else if (*adversary == "mitm") {
      Drbg attacker_rng(rng.next_u64());
      drills::Actor attacker = drills::make_actor("attacker", attacker_rng, *a.params, 4,
                                                  a.actor.device.challenge_bits);
      r = drills::run_mitm_once(init_cfg, resp_cfg, attacker, responder_id, db, rng, *a.params);
      drill_note = "mitm: M4 certificate substituted by an active adversary";
    } else if (*adversary == "tamper-cert") {
      const std::size_t pos = rng.next_u64() % certs::kFrameUnit;
      r = drills::run_cert_tamper_once(init_cfg, resp_cfg, pos, db, rng);
      drill_note = "tamper-cert: flipped certificate byte " + std::to_string(pos) + " in flight";
    } else if (*adversary == "tamper-verdict") {
      r = drills::run_verdict_replay_once(init_cfg, resp_cfg, db, rng);
      drill_note = "tamper-verdict: stale sealed verdict replayed into M6";
    } else {
      throw Error(ErrorClass::ConfigError, "unknown adversary mode '" + *adversary + "'");
    }

    persist_sign_state(workspace, a.actor);
    persist_sign_state(workspace, b.actor);

    if (!drill_note.empty()) out << drill_note << "\n";
    for (const auto& [type, bytes] : r.trace)
      out << "  " << handshake::msg_type_name(type) << "  " << bytes << " B\n";
    out << "initiator: " << handshake::state_name(r.initiator_state);
    if (r.initiator_state == handshake::State::Failed)
      out << " (" << handshake::fail_reason_name(r.initiator_reason) << ")";
    out << "\nresponder: " << handshake::state_name(r.responder_state);
    if (r.responder_state == handshake::State::Failed)
      out << " (" << handshake::fail_reason_name(r.responder_reason) << ")";
    out << "\n";

    if (!adversary) {
      if (!r.established()) {
        err << "error[auth-failure]: handshake did not establish\n";
        return exit_code_for(ErrorClass::AuthFailure);
      }
      out << "session key fingerprints: initiator=" << key_fingerprint(*r.initiator_key)
          << " responder=" << key_fingerprint(*r.responder_key)
          << (r.initiator_key == r.responder_key ? " (match)" : " (MISMATCH)") << "\n";
      return r.initiator_key == r.responder_key ? 0 : exit_code_for(ErrorClass::AuthFailure);
    }

    // Drill mode succeeds when the attack was repelled.
    const bool attacked_side_established =
        *adversary == "spoof" ? r.established()
                              : r.initiator_state == handshake::State::Established;
    if (attacked_side_established) {
      err << "error[auth-failure]: adversary drill was accepted by the victim\n";
      return exit_code_for(ErrorClass::AuthFailure);
    }
    out << "drill repelled\n";
    return 0;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

int cmd_simulate(const fs::path& workspace, const std::optional<fs::path>& scenario_file,
                 const std::optional<fs::path>& out_csv, std::optional<std::uint64_t> seed,
                 std::ostream& out, std::ostream& err) {
  try {
    netsim::ScenarioSpec spec = scenario_file
                                    ? netsim::parse_scenario_text(read_text(*scenario_file))
                                    : netsim::default_sweep_spec();
    if (seed) spec.base.seed = *seed;

    netsim::SweepResult result;
    if (spec.sweep) {
      result = netsim::run_sweep(spec.base, spec.n_min, spec.n_max, spec.n_step, spec.repeats);
    } else {
      result.rows.push_back(
          netsim::SweepRow{spec.base.n_ues, spec.base.seed, netsim::run_once(spec.base)});
      result.summary = netsim::summarize(result.rows);
    }

    const fs::path csv_path = out_csv ? *out_csv : workspace / "out" / "sim.csv";
    fs::create_directories(csv_path.parent_path());
    const std::string csv = netsim::to_csv(result.rows);
    write_file(csv_path, ByteView(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));

    out << "wrote " << result.rows.size() << " rows to " << csv_path.string() << "\n";
    for (const auto& s : result.summary) {
      char line[160];
      std::snprintf(line, sizeof line,
                    "  n=%-3u mean latency %.4f s, mean overhead %.0f B, success %.0f%%\n",
                    s.n_ues, s.mean_latency_s, s.mean_overhead_bytes, s.success_rate * 100);
      out << line;
    }
    return 0;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

int cmd_report(const fs::path& workspace, const std::optional<fs::path>& csv_file,
               std::ostream& out, std::ostream& err) {
  try {
    const fs::path csv_path = csv_file ? *csv_file : workspace / "out" / "sim.csv";
    const std::vector<netsim::SweepRow> rows = netsim::parse_csv(read_text(csv_path));
    if (rows.empty())
      throw Error(ErrorClass::ConfigError, "no simulation rows in " + csv_path.string());
    const auto summary = netsim::summarize(rows);

    plot::Series overhead, latency;
    for (const auto& s : summary) {
      overhead.x.push_back(s.n_ues);
      overhead.y.push_back(s.mean_overhead_bytes / 1024.0);
      latency.x.push_back(s.n_ues);
      latency.y.push_back(s.mean_latency_s);
    }

    fs::create_directories(workspace / "out");
    const std::string ov = plot::line_chart_svg("Mutual authentication traffic overhead",
                                                "number of UEs", "overhead (KB)", overhead);
    const std::string la = plot::line_chart_svg("Mutual authentication latency", "number of UEs",
                                                "latency (s)", latency);
    const fs::path ov_path = workspace / "out" / "overhead_vs_ues.svg";
    const fs::path la_path = workspace / "out" / "latency_vs_ues.svg";
    write_file(ov_path, ByteView(reinterpret_cast<const std::uint8_t*>(ov.data()), ov.size()));
    write_file(la_path, ByteView(reinterpret_cast<const std::uint8_t*>(la.data()), la.size()));

    out << "report over " << rows.size() << " rows:\n";
    for (const auto& s : summary) {
      char line[160];
      std::snprintf(line, sizeof line,
                    "  n=%-3u mean latency %.4f s, mean overhead %.0f B, success %.0f%%\n",
                    s.n_ues, s.mean_latency_s, s.mean_overhead_bytes, s.success_rate * 100);
      out << line;
    }
    out << "plots: " << ov_path.string() << ", " << la_path.string() << "\n";
    return 0;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

}  // namespace scc5g::cli
