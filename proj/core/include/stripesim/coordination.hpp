#pragma once

#include <string>
#include <vector>

#include "stripesim/inp.hpp"

namespace stripesim {

enum class PayloadKind { kSideInfo, kCompressedSignal };

struct Message {
  int stripe = 0;
  int from_ap = 0;  // 1-based; to_ap = from_ap + 1 (the CP is L + 1)
  int to_ap = 0;
  PayloadKind kind = PayloadKind::kSideInfo;
  int payload_reals = 0;
  int timestamp = 0;  // causal order within the stripe
};

/// Record of one stripe's optimization exchange: exactly L side-info
/// messages, one hop each.
struct StripeTrace {
  int stripe = 0;
  std::vector<Message> messages;
  int hops = 0;
  long overhead_reals_total = 0;
};

/// Executes the sequential design as a chain of AP agents that share no
/// state except the forwarded side-info messages. Numerically identical
/// to run_stripe on the same inputs.
std::pair<std::pair<std::vector<ApInpResult>, SideInfo>, StripeTrace>
run_protocol(int stripe_index, const std::vector<StripeInput>& aps,
             const CMat& Sigma_x, double C_F);

struct OverheadRow {
  std::string component;  // "linear combining" / "fronthaul quantization"
  std::string scheme;
  long reals_per_link = 0;
};

/// Per-component signaling overhead table: MMSE combining and both
/// quantizer designs need the 2K^2-real side info; MRC combining needs
/// none.
std::vector<OverheadRow> overhead_report(int ues);

long total_overhead_reals(const std::vector<StripeTrace>& traces);

}  // namespace stripesim
