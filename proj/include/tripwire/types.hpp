#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tripwire {

using TimeMs = std::int64_t;

/// Error with a stage tag so CLI/service diagnostics can say which
/// subsystem rejected the input ("env: duplicate target id 'h1'").
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Closed capability enumeration; unknown names are rejected at load time.
enum class Capability {
  InjectHttpEndpoint,
  InjectHttpHeader,
  InjectCookie,
  InjectFileToken,
  InjectEnvVar,
  CreateBucketDecoy,
  CreateSshDecoy,
};

inline const char* capability_name(Capability c) {
  switch (c) {
    case Capability::InjectHttpEndpoint: return "inject-http-endpoint";
    case Capability::InjectHttpHeader: return "inject-http-header";
    case Capability::InjectCookie: return "inject-cookie";
    case Capability::InjectFileToken: return "inject-file-token";
    case Capability::InjectEnvVar: return "inject-env-var";
    case Capability::CreateBucketDecoy: return "create-bucket-decoy";
    case Capability::CreateSshDecoy: return "create-ssh-decoy";
  }
  return "unknown";
}

inline Capability parse_capability(const std::string& name) {
  static const std::map<std::string, Capability> table = {
      {"inject-http-endpoint", Capability::InjectHttpEndpoint},
      {"inject-http-header", Capability::InjectHttpHeader},
      {"inject-cookie", Capability::InjectCookie},
      {"inject-file-token", Capability::InjectFileToken},
      {"inject-env-var", Capability::InjectEnvVar},
      {"create-bucket-decoy", Capability::CreateBucketDecoy},
      {"create-ssh-decoy", Capability::CreateSshDecoy},
  };
  auto it = table.find(name);
  if (it == table.end()) throw Error("capability", "unknown capability name '" + name + "'");
  return it->second;
}

enum class TargetKind { Process, HostFilesystem, CloudService, DecoyHost };

inline const char* target_kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::Process: return "process";
    case TargetKind::HostFilesystem: return "host-filesystem";
    case TargetKind::CloudService: return "cloud-service";
    case TargetKind::DecoyHost: return "decoy-host";
  }
  return "unknown";
}

inline TargetKind parse_target_kind(const std::string& name) {
  if (name == "process") return TargetKind::Process;
  if (name == "host-filesystem") return TargetKind::HostFilesystem;
  if (name == "cloud-service") return TargetKind::CloudService;
  if (name == "decoy-host") return TargetKind::DecoyHost;
  throw Error("environment", "unknown target kind '" + name + "'");
}

enum class ComponentRole { Lure, Decoy };

inline const char* role_name(ComponentRole r) {
  return r == ComponentRole::Lure ? "lure" : "decoy";
}

inline ComponentRole parse_role(const std::string& name) {
  if (name == "lure") return ComponentRole::Lure;
  if (name == "decoy") return ComponentRole::Decoy;
  throw Error("tripwire-pool", "unknown role '" + name + "'");
}

// Accessor id used when an access originates outside the environment.
inline const std::string kExternalAccessor = "external";

}  // namespace tripwire
