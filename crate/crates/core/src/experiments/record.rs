use std::io::{Read, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{generate, Family, GeneratorSpec};
use crate::error::{GeomError, Result};
use crate::numkit::Vector;
use crate::polarity::{polar, santalo_point, DEFAULT_TOL};
use crate::polytope::hausdorff;
use crate::simplexflags::{lemma_report, sandwich_delta, RegularSimplex};

/// One body of a sweep with everything measured on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub record_index: usize,
    pub delta_spec: f64,
    pub delta_actual: f64,
    pub hausdorff: f64,
    pub santalo: Vec<f64>,
    pub vol_k: f64,
    pub vol_polar_s: f64,
    pub vp: f64,
    /// `|K| |K°|` with polarity centre at the origin
    pub vol_polar_0_product: f64,
    pub lemma32_margin: f64,
    pub lemma33_p_ratio: Option<f64>,
    pub lemma33_pp_ratio: Option<f64>,
    pub lemma34_ratio: Option<f64>,
    pub prop35_ratio: Option<f64>,
    pub facet_centroids_ok: bool,
    pub runtime_ms: f64,
    /// Extra quantities kept out of the CSV.
    #[serde(skip)]
    pub detail: RecordDetail,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordDetail {
    pub p_minus_q: f64,
    pub pp_minus_qp: f64,
    pub tangency_pass: bool,
    pub tangency_residual: f64,
    pub containment_ok: bool,
    pub overlap: bool,
    pub santalo_centroid_norm: f64,
}

impl ExperimentRecord {
    pub fn santalo_norm(&self) -> f64 {
        self.santalo.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// A record that could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordFailure {
    pub record_index: usize,
    pub delta_spec: f64,
    pub message: String,
}

/// Generate the body for `spec` and measure it.
pub fn run_record(
    spec: &GeneratorSpec,
    record_index: usize,
    timing: bool,
) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let s = RegularSimplex::new(spec.n)?;
    let k = generate(spec)?;
    let delta_actual = sandwich_delta(&k, &s)?;
    let hausdorff = hausdorff(&k, &s.polytope())?;
    let santalo = santalo_point(&k, DEFAULT_TOL)?;
    let vol_k = k.volume()?;
    let vol_polar_0 = polar(&k, &Vector::zeros(spec.n))?.volume()?;
    let report = lemma_report(&k, &s)?;
    let runtime_ms = if timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok(ExperimentRecord {
        family: spec.family,
        n: spec.n,
        seed: spec.seed,
        record_index,
        delta_spec: spec.delta,
        delta_actual,
        hausdorff,
        santalo: santalo.point.as_slice().to_vec(),
        vol_k,
        vol_polar_s: santalo.polar_volume,
        vp: vol_k * santalo.polar_volume,
        vol_polar_0_product: vol_k * vol_polar_0,
        lemma32_margin: report.q_product.margin,
        lemma33_p_ratio: report.second_order.p_ratio,
        lemma33_pp_ratio: report.second_order.p_dual_ratio,
        lemma34_ratio: report.dichotomy.ratio,
        prop35_ratio: report.product_gain.ratio,
        facet_centroids_ok: report.facet_centroids_in_k,
        runtime_ms,
        detail: RecordDetail {
            p_minus_q: report.second_order.p_minus_q,
            pp_minus_qp: report.second_order.p_dual_minus_q_dual,
            tangency_pass: report.tangency.pass,
            tangency_residual: report.tangency.max_residual,
            containment_ok: report.containment.all(),
            overlap: report.overlap(),
            santalo_centroid_norm: santalo.centroid_norm,
        },
    })
}

/// CSV header for dimension `n`.
pub fn csv_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "family",
        "n",
        "seed",
        "record_index",
        "delta_spec",
        "delta_actual",
        "hausdorff",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend((1..=n).map(|i| format!("santalo_x{i}")));
    h.extend(
        [
            "vol_K",
            "vol_polar_s",
            "vp",
            "vol_polar_0_product",
            "lemma32_margin",
            "lemma33_P_ratio",
            "lemma33_Pp_ratio",
            "lemma34_ratio",
            "prop35_ratio",
            "facet_centroids_ok",
            "runtime_ms",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    h
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_row(r: &ExperimentRecord) -> Vec<String> {
    let mut row = vec![
        r.family.to_string(),
        r.n.to_string(),
        r.seed.to_string(),
        r.record_index.to_string(),
        r.delta_spec.to_string(),
        r.delta_actual.to_string(),
        r.hausdorff.to_string(),
    ];
    row.extend(r.santalo.iter().map(|x| x.to_string()));
    row.extend([
        r.vol_k.to_string(),
        r.vol_polar_s.to_string(),
        r.vp.to_string(),
        r.vol_polar_0_product.to_string(),
        r.lemma32_margin.to_string(),
        opt(r.lemma33_p_ratio),
        opt(r.lemma33_pp_ratio),
        opt(r.lemma34_ratio),
        opt(r.prop35_ratio),
        r.facet_centroids_ok.to_string(),
        r.runtime_ms.to_string(),
    ]);
    row
}

fn csv_err(e: csv::Error) -> GeomError {
    GeomError::InvalidInput(format!("csv: {e}"))
}

/// Write records of one dimension as CSV; numbers use shortest round-trip form.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], n: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(n)).map_err(csv_err)?;
    for r in records {
        if r.n != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: r.n,
            });
        }
        w.write_record(csv_row(r)).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| GeomError::InvalidInput(format!("csv: {e}")))
}

/// Read records back from CSV written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let n = headers
        .iter()
        .filter(|h| h.starts_with("santalo_x"))
        .count();
    if headers.iter().collect::<Vec<_>>() != csv_header(n) {
        return Err(GeomError::InvalidInput("unexpected CSV header".into()));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            field(i)
                .parse::<f64>()
                .map_err(|_| GeomError::InvalidInput(format!("bad number {:?}", field(i))))
        };
        let maybe = |i: usize| -> Result<Option<f64>> {
            if field(i).is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        let int = |i: usize| -> Result<u64> {
            field(i)
                .parse::<u64>()
                .map_err(|_| GeomError::InvalidInput(format!("bad integer {:?}", field(i))))
        };
        let b = 7 + n;
        out.push(ExperimentRecord {
            family: field(0).parse()?,
            n: int(1)? as usize,
            seed: int(2)?,
            record_index: int(3)? as usize,
            delta_spec: num(4)?,
            delta_actual: num(5)?,
            hausdorff: num(6)?,
            santalo: (7..b).map(num).collect::<Result<_>>()?,
            vol_k: num(b)?,
            vol_polar_s: num(b + 1)?,
            vp: num(b + 2)?,
            vol_polar_0_product: num(b + 3)?,
            lemma32_margin: num(b + 4)?,
            lemma33_p_ratio: maybe(b + 5)?,
            lemma33_pp_ratio: maybe(b + 6)?,
            lemma34_ratio: maybe(b + 7)?,
            prop35_ratio: maybe(b + 8)?,
            facet_centroids_ok: field(b + 9) == "true",
            runtime_ms: num(b + 10)?,
            detail: RecordDetail::default(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_order() {
        let h = csv_header(2);
        assert_eq!(h[7], "santalo_x1");
        assert_eq!(h[8], "santalo_x2");
        assert_eq!(h.last().unwrap(), "runtime_ms");
        assert_eq!(h.len(), 20);
    }

    #[test]
    fn control_row_is_the_simplex() {
        for n in 2..=3 {
            let spec = GeneratorSpec::new(Family::VertexShrink, n, 0.0, 1, 0);
            let r = run_record(&spec, 0, false).unwrap();
            let exact = crate::polarity::simplex_volume_product(n);
            assert!((r.vp - exact).abs() < 1e-9 * exact);
            assert_eq!(r.delta_actual, 0.0);
            assert!(r.lemma32_margin.abs() < 1e-9);
            assert!(r.lemma34_ratio.is_none() && r.prop35_ratio.is_none());
        }
    }

    #[test]
    fn csv_round_trip() {
        let recs: Vec<ExperimentRecord> = (0..3)
            .map(|i| {
                let spec = GeneratorSpec::new(Family::FacetCut, 2, 0.02, 5, i);
                run_record(&spec, i as usize, false).unwrap()
            })
            .collect();
        let mut buf = Vec::new();
        write_csv(&recs, 2, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in recs.iter().zip(&back) {
            assert_eq!(a.vp, b.vp);
            assert_eq!(a.santalo, b.santalo);
            assert_eq!(a.lemma34_ratio, b.lemma34_ratio);
        }
    }

    #[test]
    fn santalo_optimum_below_origin_product() {
        let spec = GeneratorSpec::new(Family::RandomSupport, 3, 0.03, 8, 0);
        let r = run_record(&spec, 0, false).unwrap();
        assert!(r.vp <= r.vol_polar_0_product * (1.0 + 1e-12));
        if r.santalo_norm() > 1e-7 {
            assert!(r.vp < r.vol_polar_0_product);
        }
    }
}
