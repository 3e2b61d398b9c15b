use serde::Serialize;

use crate::decoder::Decoder;
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, LeafDistribution};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementPoint {
    /// Barycentric grid coordinates, summing to the resolution.
    pub ijk: (usize, usize, usize),
    pub p: [f64; 3],
    pub pred_a: String,
    pub pred_b: String,
    pub agree: bool,
}

/// Agreement of two decoders over a barycentric mesh of the 3-leaf simplex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgreementGrid {
    pub resolution: usize,
    pub decoder_a: String,
    pub decoder_b: String,
    pub points: Vec<AgreementPoint>,
}

impl AgreementGrid {
    pub fn agreement_fraction(&self) -> f64 {
        self.points.iter().filter(|p| p.agree).count() as f64 / self.points.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["p1", "p2", "p3", "pred_a", "pred_b", "agree"])
            .expect("in-memory write");
        for pt in &self.points {
            w.write_record([
                pt.p[0].to_string(),
                pt.p[1].to_string(),
                pt.p[2].to_string(),
                pt.pred_a.clone(),
                pt.pred_b.clone(),
                u8::from(pt.agree).to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Plain-text PPM (P3). Row `i` holds the points with first coordinate
    /// `i / resolution`, column `j` the second; cells outside the simplex are
    /// white, agreement is green and disagreement red.
    pub fn to_ppm(&self) -> String {
        let n = self.resolution + 1;
        let mut cells = vec![[255u8, 255, 255]; n * n];
        for pt in &self.points {
            let (i, j, _) = pt.ijk;
            cells[i * n + j] = if pt.agree { [40, 160, 60] } else { [200, 40, 40] };
        }
        let mut out = format!("P3\n{n} {n}\n255\n");
        for row in cells.chunks(n) {
            let line: Vec<String> = row
                .iter()
                .map(|c| format!("{} {} {}", c[0], c[1], c[2]))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Evaluates both decoders at every point `(i, j, k) / resolution` with
/// `i + j + k = resolution`.
pub fn agreement_map(
    h: &Hierarchy,
    a: &Decoder,
    b: &Decoder,
    resolution: usize,
) -> Result<AgreementGrid> {
    if h.leaf_count() != 3 {
        return Err(Error::WrongLeafCount(h.leaf_count()));
    }
    if resolution == 0 {
        return Err(Error::InvalidParam("resolution must be >= 1".into()));
    }
    let r = resolution as f64;
    let mut points = Vec::with_capacity((resolution + 1) * (resolution + 2) / 2);
    for i in 0..=resolution {
        for j in 0..=resolution - i {
            let k = resolution - i - j;
            let p = [i as f64 / r, j as f64 / r, k as f64 / r];
            let dist = LeafDistribution::new(p.to_vec())?;
            let pa = a.decode(h, &dist)?;
            let pb = b.decode(h, &dist)?;
            points.push(AgreementPoint {
                ijk: (i, j, k),
                p,
                pred_a: pa.display(h),
                pred_b: pb.display(h),
                agree: pa.agrees_with(&pb, h),
            });
        }
    }
    Ok(AgreementGrid {
        resolution,
        decoder_a: a.name(),
        decoder_b: b.name(),
        points,
    })
}
