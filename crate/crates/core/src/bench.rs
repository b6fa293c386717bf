//! Delay measurement, delay histograms and benchmark report rows.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Per-result delays, median over repeated runs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DelayProfile {
    /// Median gap from each returned item to the next return of `next`.
    pub delays_ns: Vec<u64>,
    /// Median time from iterator creation to the first return.
    pub first_ns: u64,
    pub runs: usize,
}

impl DelayProfile {
    pub fn len(&self) -> usize {
        self.delays_ns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays_ns.is_empty()
    }

    pub fn max_ns(&self) -> u64 {
        self.delays_ns.iter().copied().max().unwrap_or(0)
    }

    pub fn avg_ns(&self) -> u64 {
        if self.delays_ns.is_empty() {
            return 0;
        }
        (self.delays_ns.iter().map(|&d| d as u128).sum::<u128>() / self.delays_ns.len() as u128) as u64
    }

    pub fn total_ns(&self) -> u64 {
        self.delays_ns.iter().sum()
    }
}

fn fingerprint<T: Hash>(item: &T) -> u64 {
    let mut h = DefaultHasher::new();
    item.hash(&mut h);
    h.finish()
}

fn median(mut s: Vec<u64>) -> u64 {
    s.sort_unstable();
    s[(s.len() - 1) / 2]
}

/// Times the gaps between successive returns of `runs` fresh iterators
/// from `start`.
///
/// Delay `k` runs from the return of item `k` to the next return, which
/// is item `k + 1` or the end of the stream. The wait for the first item
/// is kept apart in `first_ns`. Every run must yield the same sequence.
pub fn measure_delays<T, I, F>(runs: usize, mut start: F) -> Result<DelayProfile>
where
    T: Hash,
    I: Iterator<Item = T>,
    F: FnMut() -> I,
{
    let runs = runs.max(1);
    let mut samples: Vec<Vec<u64>> = Vec::new();
    let mut first = Vec::with_capacity(runs);
    let mut order: Vec<u64> = Vec::new();
    for run in 0..runs {
        let mut it = start();
        let mut index = 0;
        let mut last = Instant::now();
        loop {
            let item = it.next();
            let now = Instant::now();
            let d = now.duration_since(last).as_nanos() as u64;
            if index == 0 {
                first.push(d);
            } else {
                samples[index - 1].push(d);
            }
            let Some(item) = item else { break };
            let f = fingerprint(&item);
            if run == 0 {
                order.push(f);
                samples.push(Vec::with_capacity(runs));
            } else if order.get(index) != Some(&f) {
                return Err(Error::NondeterministicOrder { index });
            }
            index += 1;
            last = Instant::now();
        }
        if index != order.len() {
            return Err(Error::NondeterministicOrder { index });
        }
    }
    let delays_ns = samples.into_iter().map(median).collect();
    Ok(DelayProfile { delays_ns, first_ns: median(first), runs })
}

/// `(bucket_lower_ns, count)` for every bucket from the one holding the
/// smallest delay to the one holding the largest.
pub fn emit_histogram(profile: &DelayProfile, bucket_width: u64) -> Result<Vec<(u64, u64)>> {
    if bucket_width == 0 {
        return Err(Error::InvalidBucketWidth);
    }
    let (Some(&lo), Some(&hi)) = (profile.delays_ns.iter().min(), profile.delays_ns.iter().max()) else {
        return Ok(Vec::new());
    };
    let first = lo / bucket_width;
    let last = hi / bucket_width;
    let mut counts = vec![0u64; (last - first + 1) as usize];
    for &d in &profile.delays_ns {
        counts[(d / bucket_width - first) as usize] += 1;
    }
    Ok(counts.into_iter().enumerate().map(|(i, c)| ((first + i as u64) * bucket_width, c)).collect())
}

/// Writes a histogram as CSV with a `bucket_lower_ns,count` header.
pub fn write_histogram_csv<W: Write>(rows: &[(u64, u64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["bucket_lower_ns", "count"]).map_err(io)?;
    for (lower, count) in rows {
        w.write_record([lower.to_string(), count.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// One benchmark row.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub doc_bytes: usize,
    pub pattern: String,
    pub preproc: Duration,
    pub enumeration: Duration,
    pub results: usize,
    pub avg_delay_ns: u64,
    pub max_delay_ns: u64,
    pub dag_bytes: usize,
    pub jump_bytes: usize,
    pub matrix_bytes: usize,
}

impl BenchReport {
    pub const HEADER: [&'static str; 9] = [
        "doc_bytes",
        "pattern",
        "preproc_ms",
        "results",
        "avg_delay_ns",
        "max_delay_ns",
        "dag_bytes",
        "jump_bytes",
        "matrix_bytes",
    ];

    pub fn record(&self) -> [String; 9] {
        [
            self.doc_bytes.to_string(),
            self.pattern.clone(),
            format!("{:.3}", self.preproc.as_secs_f64() * 1e3),
            self.results.to_string(),
            self.avg_delay_ns.to_string(),
            self.max_delay_ns.to_string(),
            self.dag_bytes.to_string(),
            self.jump_bytes.to_string(),
            self.matrix_bytes.to_string(),
        ]
    }
}

/// Writes reports as CSV with a header row.
pub fn write_reports_csv<W: Write>(reports: &[BenchReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(BenchReport::HEADER).map_err(io)?;
    for r in reports {
        w.write_record(r.record()).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_results_give_empty_profile() {
        let p = measure_delays(3, std::iter::empty::<u32>).unwrap();
        assert!(p.is_empty());
        assert_eq!(emit_histogram(&p, 10).unwrap(), vec![]);
    }

    #[test]
    fn single_run_keeps_its_delays() {
        let p = measure_delays(1, || 0..5u32).unwrap();
        assert_eq!(p.len(), 5);
        assert_eq!(p.runs, 1);
    }

    #[test]
    fn order_change_is_detected() {
        let mut flip = false;
        let err = measure_delays(2, || {
            flip = !flip;
            if flip { vec![1, 2] } else { vec![2, 1] }.into_iter()
        })
        .unwrap_err();
        assert_eq!(err, Error::NondeterministicOrder { index: 0 });
    }

    #[test]
    fn fixed_cadence_medians() {
        let p = measure_delays(3, || (0..4).inspect(|_| std::thread::sleep(Duration::from_millis(1)))).unwrap();
        assert_eq!(p.len(), 4);
        for &d in p.delays_ns[..3].iter().chain([&p.first_ns]) {
            assert!((1_000_000..20_000_000).contains(&d), "{d}");
        }
        assert!(p.delays_ns[3] < 1_000_000);
    }

    #[test]
    fn histogram_buckets() {
        let one = DelayProfile { delays_ns: vec![42], runs: 1, ..Default::default() };
        assert_eq!(emit_histogram(&one, 10).unwrap(), vec![(40, 1)]);
        let two = DelayProfile { delays_ns: vec![1, 2, 11, 12, 13], runs: 1, ..Default::default() };
        assert_eq!(emit_histogram(&two, 10).unwrap(), vec![(0, 2), (10, 3)]);
        assert_eq!(emit_histogram(&two, 0).unwrap_err(), Error::InvalidBucketWidth);
    }

    #[test]
    fn report_csv() {
        let r = BenchReport {
            doc_bytes: 9,
            pattern: "a,b".into(),
            preproc: Duration::from_micros(1500),
            enumeration: Duration::ZERO,
            results: 2,
            avg_delay_ns: 10,
            max_delay_ns: 20,
            dag_bytes: 1,
            jump_bytes: 2,
            matrix_bytes: 3,
        };
        let mut buf = Vec::new();
        write_reports_csv(&[r], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "doc_bytes,pattern,preproc_ms,results,avg_delay_ns,max_delay_ns,dag_bytes,jump_bytes,matrix_bytes\n9,\"a,b\",1.500,2,10,20,1,2,3\n"
        );
    }
}
