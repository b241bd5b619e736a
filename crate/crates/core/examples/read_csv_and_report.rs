//! Reads a CSV column, builds an interval and writes it as JSON and as a table.

use std::io::Write;

use quantile_bootstrap::ci::{ci_one_sample, CiMethod, CiRequest};
use quantile_bootstrap::io::{read_sample, render_report, CsvColumn, InputSpec, ReportFormat};
use quantile_bootstrap::quantile::SortedSample;

fn main() -> quantile_bootstrap::Result<()> {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    writeln!(file, "request_id,latency_ms").unwrap();
    for i in 0..400u32 {
        // deterministic spread of latencies
        writeln!(file, "r{i},{}", 20.0 + f64::from((i * 37) % 101) * 0.5).unwrap();
    }

    let input = read_sample(&InputSpec::csv(file.path(), CsvColumn::Name("latency_ms".into())))?;
    println!("read {} values", input.values.len());
    let sample = SortedSample::from_unsorted(input.values)?;
    let ci = ci_one_sample(&sample, &CiRequest::new(0.99, 0.05, 0, CiMethod::Fast, 0)?)?;
    print!("{}", render_report(&ci, ReportFormat::Json)?);
    print!("{}", render_report(&ci, ReportFormat::Table)?);
    Ok(())
}
