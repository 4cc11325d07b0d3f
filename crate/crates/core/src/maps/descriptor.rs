//! JSON descriptor for [`MapSpec`]: `{kind, m, delta, k, children}`.

use serde::{Deserialize, Serialize};

use super::MapSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Descriptor {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub children: Option<Vec<Descriptor>>,
}

impl Descriptor {
    fn leaf(kind: &str) -> Self {
        Descriptor {
            kind: kind.into(),
            m: None,
            delta: None,
            k: None,
            children: None,
        }
    }
}

impl From<MapSpec> for Descriptor {
    fn from(map: MapSpec) -> Self {
        match map {
            MapSpec::SigmaQ22 => Descriptor::leaf("sigma_q22"),
            MapSpec::SigmaQ40 => Descriptor::leaf("sigma_q40"),
            MapSpec::ReflectF => Descriptor::leaf("reflect_f"),
            MapSpec::Twist { m, delta } => Descriptor {
                m: Some(m),
                delta: Some(delta),
                ..Descriptor::leaf("twist")
            },
            MapSpec::Power { base, k } => Descriptor {
                k: Some(k),
                children: Some(vec![(*base).into()]),
                ..Descriptor::leaf("power")
            },
            MapSpec::Compose(list) => Descriptor {
                children: Some(list.into_iter().map(Into::into).collect()),
                ..Descriptor::leaf("compose")
            },
        }
    }
}

impl TryFrom<Descriptor> for MapSpec {
    type Error = crate::Error;

    fn try_from(d: Descriptor) -> crate::Result<Self> {
        let children = |d: Descriptor| -> crate::Result<Vec<MapSpec>> {
            d.children
                .unwrap_or_default()
                .into_iter()
                .map(MapSpec::try_from)
                .collect()
        };
        match d.kind.as_str() {
            "sigma_q22" => Ok(MapSpec::SigmaQ22),
            "sigma_q40" => Ok(MapSpec::SigmaQ40),
            "reflect_f" => Ok(MapSpec::ReflectF),
            "twist" => {
                let m =
                    d.m.ok_or_else(|| crate::Error::Parse("twist needs field m".into()))?;
                let delta = d.delta.unwrap_or(0.5);
                MapSpec::twist(m, delta)
            }
            "power" => {
                let k =
                    d.k.ok_or_else(|| crate::Error::Parse("power needs field k".into()))?;
                let mut kids = children(d)?;
                if kids.len() != 1 {
                    return Err(crate::Error::Parse("power needs exactly one child".into()));
                }
                Ok(MapSpec::power(kids.remove(0), k))
            }
            "compose" => Ok(MapSpec::Compose(children(d)?)),
            other => Err(crate::Error::Parse(format!("unknown map kind '{other}'"))),
        }
    }
}
