//! JSON documents for instances and policies. Rationals travel as
//! `"num/den"` strings so nothing is ever rounded through a float.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rational::{format_rational, is_positive, parse_rational, Rational};
use super::{validate_instance, Commodity, CommodityClass, Instance, Policy, Violation};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("field `{field}` of {owner}: bad rational `{text}`: {reason}")]
    BadRational {
        owner: String,
        field: String,
        text: String,
        reason: String,
    },
    #[error("{0}")]
    NonPositive(Violation),
    #[error("commodity `{id}`: unknown class tag `{tag}`")]
    UnknownClass { id: String, tag: String },
    #[error("duplicate commodity id `{0}`")]
    DuplicateId(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CommodityDoc {
    id: String,
    class: String,
    lambda: String,
    h: String,
    k: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    k0: String,
    commodities: Vec<CommodityDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyDoc {
    cycles: BTreeMap<String, String>,
}

fn field(owner: &str, name: &str, text: &str) -> Result<Rational, LoadError> {
    parse_rational(text).map_err(|e| LoadError::BadRational {
        owner: owner.to_string(),
        field: name.to_string(),
        text: text.to_string(),
        reason: e.to_string(),
    })
}

pub fn load_instance(bytes: &[u8]) -> Result<Instance, LoadError> {
    let doc: InstanceDoc =
        serde_json::from_slice(bytes).map_err(|e| LoadError::Malformed(e.to_string()))?;
    let joint_setup = field("instance", "k0", &doc.k0)?;
    let mut commodities = Vec::with_capacity(doc.commodities.len());
    for c in doc.commodities {
        let owner = format!("commodity `{}`", c.id);
        let class = CommodityClass::from_tag(&c.class).ok_or_else(|| LoadError::UnknownClass {
            id: c.id.clone(),
            tag: c.class.clone(),
        })?;
        commodities.push(Commodity {
            demand: field(&owner, "lambda", &c.lambda)?,
            holding: field(&owner, "h", &c.h)?,
            setup: field(&owner, "k", &c.k)?,
            id: c.id,
            class,
        });
    }
    let instance = Instance {
        commodities,
        joint_setup,
        meta: doc.meta,
    };
    if let Some(v) = validate_instance(&instance).violations.into_iter().next() {
        return Err(match v {
            Violation::DuplicateId(id) => LoadError::DuplicateId(id),
            other => LoadError::NonPositive(other),
        });
    }
    Ok(instance)
}

pub fn save_instance(instance: &Instance) -> Vec<u8> {
    let doc = InstanceDoc {
        k0: format_rational(&instance.joint_setup),
        commodities: instance
            .commodities
            .iter()
            .map(|c| CommodityDoc {
                id: c.id.clone(),
                class: c.class.tag().to_string(),
                lambda: format_rational(&c.demand),
                h: format_rational(&c.holding),
                k: format_rational(&c.setup),
            })
            .collect(),
        meta: instance.meta.clone(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("instance document serializes");
    out.push(b'\n');
    out
}

pub fn load_policy(bytes: &[u8]) -> Result<Policy, LoadError> {
    let doc: PolicyDoc =
        serde_json::from_slice(bytes).map_err(|e| LoadError::Malformed(e.to_string()))?;
    let mut policy = Policy::new();
    for (id, text) in doc.cycles {
        let t = field(&format!("policy entry `{id}`"), "cycle", &text)?;
        if !is_positive(&t) {
            return Err(LoadError::NonPositive(Violation::NonPositive {
                commodity: Some(id),
                field: "cycle",
                value: t,
            }));
        }
        policy.set(id, t);
    }
    Ok(policy)
}

pub fn save_policy(policy: &Policy) -> Vec<u8> {
    let doc = PolicyDoc {
        cycles: policy
            .cycles
            .iter()
            .map(|(k, v)| (k.clone(), format_rational(v)))
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("policy document serializes");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::super::rational::{int, ratio};
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Instance {
        Instance::new(
            vec![
                Commodity::generic("a", 25, 1, 2),
                Commodity::new(
                    "b",
                    CommodityClass::Constant,
                    int(2),
                    ratio(2500, 1809),
                    ratio(10000, 201),
                ),
                Commodity::new(
                    "c",
                    CommodityClass::Clause,
                    ratio(1, 3),
                    ratio(7, 2),
                    int(9),
                ),
            ],
            int(1),
        )
    }

    #[test]
    fn instance_round_trip() {
        let inst = sample();
        assert_eq!(load_instance(&save_instance(&inst)).unwrap(), inst);
        let mut with_meta = inst;
        with_meta.meta = Some(serde_json::json!({"delta": "1/100"}));
        assert_eq!(
            load_instance(&save_instance(&with_meta)).unwrap(),
            with_meta
        );
    }

    #[test]
    fn parses_exactly() {
        let text = r#"{"k0":"1","commodities":[{"id":"x","class":"constant","lambda":"2","h":"2500/1809","k":"10000/201"}]}"#;
        let inst = load_instance(text.as_bytes()).unwrap();
        assert_eq!(inst.commodities[0].holding, ratio(2500, 1809));
    }

    #[test]
    fn distinct_diagnostics() {
        let make = |class: &str, h: &str| {
            format!(
                r#"{{"k0":"1/1","commodities":[{{"id":"x","class":"{class}","lambda":"1","h":"{h}","k":"1"}}]}}"#
            )
        };
        assert!(matches!(
            load_instance(make("generic", "-1/2").as_bytes()),
            Err(LoadError::NonPositive(_))
        ));
        assert!(matches!(
            load_instance(make("widget", "1").as_bytes()),
            Err(LoadError::UnknownClass { .. })
        ));
        assert!(matches!(
            load_instance(make("generic", "0.5").as_bytes()),
            Err(LoadError::BadRational { .. })
        ));
        assert!(matches!(
            load_instance(b"{\"k0\": 1"),
            Err(LoadError::Malformed(_))
        ));
        assert!(matches!(
            load_instance(b"{\"k0\": \"1\"}"),
            Err(LoadError::Malformed(_))
        ));
    }

    #[test]
    fn policy_round_trip() {
        let p = Policy::from_pairs([("a", ratio(101, 25)), ("b", int(6))]);
        assert_eq!(load_policy(&save_policy(&p)).unwrap(), p);
        assert!(matches!(
            load_policy(br#"{"cycles":{"a":"0"}}"#),
            Err(LoadError::NonPositive(_))
        ));
    }

    fn positive() -> impl Strategy<Value = Rational> {
        (1i64..1_000_000, 1i64..1_000_000).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #[test]
        fn random_instances_round_trip(
            params in proptest::collection::vec((positive(), positive(), positive(), 0usize..4), 1..6),
            k0 in positive(),
        ) {
            let classes = [
                CommodityClass::Constant,
                CommodityClass::Variable,
                CommodityClass::Clause,
                CommodityClass::Generic,
            ];
            let commodities = params
                .into_iter()
                .enumerate()
                .map(|(i, (l, h, k, c))| Commodity::new(format!("c{i}"), classes[c], l, h, k))
                .collect();
            let inst = Instance::new(commodities, k0);
            prop_assert_eq!(load_instance(&save_instance(&inst)).unwrap(), inst);
        }

        #[test]
        fn random_policies_round_trip(cycles in proptest::collection::btree_map("[a-z]{1,4}", positive(), 0..6)) {
            let p = Policy { cycles };
            prop_assert_eq!(load_policy(&save_policy(&p)).unwrap(), p);
        }
    }
}
