#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "receptive/features.hpp"
#include "receptive/models.hpp"

namespace receptive {

// One row of an external training table: who, in what phone context, and
// whether they turned out to be receptive there.
struct DatasetRow {
  std::string participant;
  ContextSnapshot context;
  int label = 0;  // 1 = receptive, 0 = not receptive
};

// Column order: participant, then the context fields in declaration order,
// then the label.
std::string dataset_csv_header();

std::vector<DatasetRow> read_dataset_csv(std::istream& in);
std::vector<DatasetRow> read_dataset_csv_file(const std::string& path);
void write_dataset_csv(const std::vector<DatasetRow>& rows, std::ostream& out);
void write_dataset_csv_file(const std::vector<DatasetRow>& rows, const std::string& path);

// Encodes every row, carrying the participant ids over as CV group ids.
TrainingSet to_training_set(const std::vector<DatasetRow>& rows);

}  // namespace receptive
