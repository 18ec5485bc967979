use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{DensityOperator, FockVector, ModeRegister};

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    modes: Vec<String>,
    cutoffs: Vec<usize>,
    amps: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    modes: Vec<String>,
    cutoffs: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn register_from<E: serde::de::Error>(modes: Vec<String>, cutoffs: Vec<usize>) -> Result<ModeRegister, E> {
    if modes.len() != cutoffs.len() {
        return Err(E::custom("`modes` and `cutoffs` differ in length"));
    }
    ModeRegister::new(modes.into_iter().zip(cutoffs)).map_err(E::custom)
}

impl Serialize for FockVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        VectorRepr {
            modes: self.register().labels().map(str::to_string).collect(),
            cutoffs: self.register().cutoffs().collect(),
            amps: self.amps().iter().map(pair).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = VectorRepr::deserialize(d)?;
        let register = register_from(repr.modes, repr.cutoffs)?;
        let amps = DVector::from_iterator(
            repr.amps.len(),
            repr.amps.iter().map(|[re, im]| Complex64::new(*re, *im)),
        );
        FockVector::new(register, amps).map_err(serde::de::Error::custom)
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let m = self.matrix();
        DensityRepr {
            modes: self.register().labels().map(str::to_string).collect(),
            cutoffs: self.register().cutoffs().collect(),
            matrix: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| pair(&m[(i, j)])).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = DensityRepr::deserialize(d)?;
        let register = register_from(repr.modes, repr.cutoffs)?;
        let n = repr.matrix.len();
        if repr.matrix.iter().any(|row| row.len() != n) {
            return Err(serde::de::Error::custom("matrix is not square"));
        }
        let matrix = DMatrix::from_fn(n, n, |i, j| {
            let [re, im] = repr.matrix[i][j];
            Complex64::new(re, im)
        });
        DensityOperator::new(register, matrix).map_err(serde::de::Error::custom)
    }
}
