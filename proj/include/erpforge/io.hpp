#pragma once

#include <iosfwd>
#include <string>

#include "erpforge/estimators.hpp"
#include "erpforge/types.hpp"

namespace erpforge {

// ETB, the binary trial container. Little-endian layout:
//   magic "ERPT" | u32 version=1 | u32 n_trials | u32 n_channels |
//   u32 n_samples | f32 sampling_rate_hz | f32 t0_ms | u32 name_block_len |
//   channel names joined with '\n', zero-padded to name_block_len |
//   f32 samples in [trial][channel][sample] order.
// Values are stored at 32-bit precision; in-memory data stays 64-bit.
std::string etb_bytes(const TrialSet& trials);
TrialSet parse_etb(const std::string& bytes);

TrialSet read_etb(std::istream& in);
TrialSet read_etb(const std::string& path);
void write_etb(const TrialSet& trials, std::ostream& out);
void write_etb(const TrialSet& trials, const std::string& path);

// An ERP travels as a one-trial ETB file.
Erp read_erp(const std::string& path);
void write_erp(const Erp& erp, const std::string& path);

// An uncertain ERP travels as a two-trial ETB file: mean, then sigma.
UncertainErp read_uncertain_erp(const std::string& path);
void write_uncertain_erp(const UncertainErp& erp, const std::string& path);

// Single-channel CSV: one row per trial, columns are samples. A header line
// '# rate=<hz> t0=<ms>' carries the axis; when it is absent the reader falls
// back to 500 Hz and -200 ms and warns on the given stream.
std::string csv_text(const TrialSet& trials);
TrialSet read_csv(std::istream& in, std::ostream& warnings);
TrialSet read_csv(const std::string& path);
void write_csv(const TrialSet& trials, const std::string& path);

// JSON manifest for template libraries: an array of objects with "subject",
// "task" and "path" keys; entry paths resolve relative to the manifest.
ErpLibrary read_library(const std::string& path);

// Write via a temporary file and an atomic rename, so failed commands never
// leave partial output behind. path "-" streams to stdout.
void write_file_atomic(const std::string& path, const std::string& payload);

}  // namespace erpforge
