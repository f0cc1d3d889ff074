//! Ready-made models for the examples, tests and benchmarks: the small
//! reachability example, five banking subsystems, the table-to-area mapping
//! with shared tables, and a seeded generator for large synthetic systems.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annotations::{Annotation, AnnotationSet};
use crate::model::{AreaMap, IoSignature, ModelBuilder, SystemModel, CONTROL_AREA};
use crate::pipeline::PipelineInputs;

/// A model, its area map and optional annotations.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub model: SystemModel,
    pub areas: AreaMap,
    pub annotations: Option<AnnotationSet>,
}

impl Fixture {
    pub fn inputs(&self) -> PipelineInputs {
        PipelineInputs {
            annotations: self.annotations.clone(),
            ..PipelineInputs::new(self.model.clone(), self.areas.clone())
        }
    }
}

fn sig(inputs: &[&str], outputs: &[&str]) -> IoSignature {
    IoSignature::new(inputs.iter().copied(), outputs.iter().copied())
}

fn annotate(set: &mut AnnotationSet, key: &str, ss: &str, functions: &[&str], name: &str, purpose: &str, features: &[&str]) {
    set.insert(
        key,
        Annotation {
            subsystem: Some(ss.to_string()),
            functions: Some(functions.iter().map(|f| f.to_string()).collect()),
            name: name.to_string(),
            purpose: Some(purpose.to_string()),
            features: features.iter().map(|f| f.to_string()).collect(),
            ..Annotation::default()
        },
    );
}

fn assign_all(map: &mut AreaMap, area: &str, tables: &[&str]) {
    for t in tables {
        map.assign(t, area);
    }
}

/// Two facades, four functions, four tables:
///
/// ```text
/// fc1 -> bf1 -> tb1
/// fc2 -> bf2 -> bf4 -> {tb2, tb3}
/// fc2 -> bf3 -> {tb1, tb4}
/// ```
///
/// Areas: `ss1 = {tb1}`, `ss2 = {tb3}`, `ss3 = {tb2, tb4}`.
pub fn toy() -> Fixture {
    let model = SystemModel::builder()
        .facade("fc1", sig(&["x"], &["y"]))
        .facade("fc2", sig(&["x", "r2", "r3"], &["z"]))
        .function("bf1", sig(&["x"], &["y"]))
        .function("bf2", sig(&["x"], &["r2"]))
        .function("bf3", sig(&["x"], &["r3"]))
        .function("bf4", sig(&["x"], &["r4"]))
        .tables(["tb1", "tb2", "tb3", "tb4"])
        .call("fc1", "bf1")
        .call("fc2", "bf2")
        .call("fc2", "bf3")
        .call("bf2", "bf4")
        .read("bf1", "tb1")
        .read("bf4", "tb2")
        .read("bf4", "tb3")
        .read("bf3", "tb1")
        .read("bf3", "tb4")
        .build();
    let mut areas = AreaMap::default();
    areas.assign("tb1", "ss1");
    areas.assign("tb3", "ss2");
    assign_all(&mut areas, "ss3", &["tb2", "tb4"]);
    Fixture {
        model,
        areas,
        annotations: None,
    }
}

pub const BA_AREA: &str = "BusinessActions";
pub const BA_SERVICE: &str = "BusinessActions.ListBusinessActionsForAccount";

fn add_business_actions(b: ModelBuilder, areas: &mut AreaMap, ann: &mut AnnotationSet) -> ModelBuilder {
    assign_all(areas, BA_AREA, &["ACO", "ACB", "RCA"]);
    let features = [
        "Obtain the business actions enabled for an account and channel",
        "Evaluate the special conditions attached to the account",
    ];
    let purpose = "List the business actions allowed for an account";
    annotate(ann, "ba-cce", BA_AREA, &["AUTCCEobtAcoCom"], BA_SERVICE, purpose, &features);
    annotate(
        ann,
        "ba-pos",
        BA_AREA,
        &["AUTPOScltBen", "AUTPOScltCmuEspCpp"],
        BA_SERVICE,
        purpose,
        &features,
    );

    b.facade(
        "AUTCCErspSolAutCceNov",
        sig(
            &["account_number", "channel_id", "business_action_list"],
            &["authorization_response"],
        ),
    )
    .facade(
        "AUTPOSrspIdePosTpgCmgQlq",
        sig(
            &["account_number", "channel_id", "business_action_list", "pos_request"],
            &["pos_response"],
        ),
    )
    .function(
        "AUTCCEobtAcoCom",
        sig(&["account_number", "channel_id"], &["business_action_list"]),
    )
    .function(
        "AUTPOScltBen",
        sig(
            &["account_number", "channel_id", "special_conditions"],
            &["business_action_list"],
        ),
    )
    .function("AUTPOScltCmuEspCpp", sig(&["account_number"], &["special_conditions"]))
    // Present in the code base but not on any path to the area's tables.
    .function("AUTCCEvldCnl", sig(&["channel_id"], &["channel_status"]))
    .function("AUTPOSfmtTpg", sig(&["pos_request"], &["pos_message"]))
    .tables(["ACO", "ACB", "RCA"])
    .call("AUTCCErspSolAutCceNov", "AUTCCEobtAcoCom")
    .call("AUTPOSrspIdePosTpgCmgQlq", "AUTPOScltBen")
    .call("AUTPOScltBen", "AUTPOScltCmuEspCpp")
    .read("AUTCCEobtAcoCom", "ACO")
    .read("AUTCCEobtAcoCom", "RCA")
    .read("AUTPOScltBen", "ACO")
    .read("AUTPOScltCmuEspCpp", "ACO")
    .read("AUTPOScltCmuEspCpp", "RCA")
    .read("AUTPOScltCmuEspCpp", "ACB")
}

/// The business-actions subsystem: two authorization facades, one listing
/// service behind them, tables `ACO`, `ACB`, `RCA`.
pub fn business_actions() -> Fixture {
    let mut areas = AreaMap::default();
    let mut ann = AnnotationSet::new();
    let model = add_business_actions(SystemModel::builder(), &mut areas, &mut ann).build();
    Fixture {
        model,
        areas,
        annotations: Some(ann),
    }
}

pub const SC_AREA: &str = "ServiceCharges";
pub const SC_SEQUENTIAL: usize = 14;
pub const SC_INCREMENT: usize = 20;
pub const SC_DECREMENT: usize = 17;

fn add_service_charges(mut b: ModelBuilder, areas: &mut AreaMap, ann: &mut AnnotationSet) -> ModelBuilder {
    let rate_tables = ["AGT", "ISE", "PTC", "PTF", "RTE", "RTT", "TPT", "TTE"];
    assign_all(areas, SC_AREA, &rate_tables);
    assign_all(areas, SC_AREA, &["UTM", "DUT"]);
    areas.assign("LOG", CONTROL_AREA);
    annotate(
        ann,
        "sc-calc",
        SC_AREA,
        &["SRCcalTar"],
        "ServiceCharge.CalculateServiceCharge",
        "Compute the charge applied to a transaction",
        &["Look up agreements, rates and tariff tables for the service"],
    );
    annotate(
        ann,
        "sc-inc",
        SC_AREA,
        &["SRCincUtm"],
        "ServiceCharge.IncrementServiceChargeUsage",
        "Count one more use of a charged service",
        &["Increment the monthly usage counters"],
    );
    annotate(
        ann,
        "sc-dec",
        SC_AREA,
        &["SRCdecUtm"],
        "ServiceCharge.DecrementServiceChargeUsage",
        "Undo one use of a charged service",
        &["Decrement the monthly usage counters"],
    );

    let usage = sig(&["account_number", "service_code"], &[]);
    b = b
        .function("SRCcalTar", sig(&["account_number", "service_code"], &["service_charge"]))
        .function("SRCincUtm", usage.clone())
        .function("SRCdecUtm", usage)
        .function("TRNfmtRcb", sig(&["transaction_request"], &["receipt"]))
        .tables(rate_tables)
        .tables(["UTM", "DUT", "LOG"]);
    for t in rate_tables {
        b = b.read("SRCcalTar", t);
    }
    for f in ["SRCincUtm", "SRCdecUtm"] {
        b = b
            .read(f, "UTM")
            .write(f, "UTM", Some("usage"))
            .write(f, "DUT", Some("usage"));
    }
    b = b.write("TRNfmtRcb", "LOG", None);

    for i in 1..=SC_SEQUENTIAL {
        let fc = format!("TRNrspCobTar{i:02}");
        b = b
            .facade(
                &fc,
                sig(&["account_number", "service_code", "service_charge"], &["charge_response"]),
            )
            .call(&fc, "SRCcalTar");
    }
    let usage_facade = sig(
        &["account_number", "service_code", "transaction_request", "receipt"],
        &["transaction_response"],
    );
    let counters = std::iter::repeat_n("SRCincUtm", SC_INCREMENT).chain(std::iter::repeat_n("SRCdecUtm", SC_DECREMENT));
    for (i, counter) in counters.enumerate() {
        let fc = format!("TRNrspMovUtm{:02}", i + 1);
        b = b
            .facade(&fc, usage_facade.clone())
            .call(&fc, "TRNfmtRcb")
            .call(&fc, counter);
    }
    b
}

/// Service charges: 14 facades need the computed charge before they
/// answer, 37 bump usage counters after doing their own work.
pub fn service_charges() -> Fixture {
    let mut areas = AreaMap::default();
    let mut ann = AnnotationSet::new();
    let model = add_service_charges(SystemModel::builder(), &mut areas, &mut ann).build();
    Fixture {
        model,
        areas,
        annotations: Some(ann),
    }
}

pub const CLIENT_AREA: &str = "Clients";
pub const CLIENT_FACADES: usize = 51;

fn add_clients(mut b: ModelBuilder, areas: &mut AreaMap) -> ModelBuilder {
    areas.assign("CLT", CLIENT_AREA);
    b = b
        .function("CLIvldReq", sig(&["client_request"], &["client_id"]))
        .function("CLTobtCli", sig(&["client_id"], &["client_record"]))
        .function("CLIfmtRsp", sig(&["client_record"], &["client_response"]))
        .table("CLT")
        .read("CLTobtCli", "CLT");
    for i in 1..=CLIENT_FACADES {
        let fc = format!("CLIrspCns{i:02}");
        b = b
            .facade(&fc, sig(&["client_request"], &["client_response"]))
            .call(&fc, "CLIvldReq")
            .call(&fc, "CLTobtCli")
            .call(&fc, "CLIfmtRsp");
    }
    b
}

/// Every client facade validates, reads the client record, then formats the
/// answer from it: the read sits in the middle of each facade.
pub fn clients() -> Fixture {
    let mut areas = AreaMap::default();
    let model = add_clients(SystemModel::builder(), &mut areas).build();
    Fixture {
        model,
        areas,
        annotations: None,
    }
}

pub const CHECKS_AREA: &str = "Checks";

fn add_checks(mut b: ModelBuilder, areas: &mut AreaMap) -> ModelBuilder {
    let tables = ["CHS", "TCE", "ECH", "HET", "CCF"];
    assign_all(areas, CHECKS_AREA, &tables);
    b = b.tables(tables);
    let ops = [
        ("CHQobtChs", &["CHS"][..]),
        ("CHQobtTce", &["TCE"]),
        ("CHQregEch", &["ECH"]),
        ("CHQobtHet", &["HET"]),
        ("CHQvldCcf", &["CCF"]),
        ("CHQobtChsTce", &["CHS", "TCE"]),
        ("CHQregEchHet", &["ECH", "HET"]),
        ("CHQcnsCcfChs", &["CCF", "CHS"]),
    ];
    for (i, (f, reads)) in ops.iter().enumerate() {
        let out = format!("check_data_{}", i + 1);
        let fc = format!("CHQrspOpe{:02}", i + 1);
        b = b
            .function(f, sig(&["account_number", "check_number"], &[&out]))
            .facade(&fc, sig(&["account_number", "check_number", &out], &["check_response"]))
            .call(&fc, f);
        for t in *reads {
            b = b.read(f, t);
        }
    }
    b
}

/// Eight independent check operations, each its own candidate.
pub fn checks() -> Fixture {
    let mut areas = AreaMap::default();
    let model = add_checks(SystemModel::builder(), &mut areas).build();
    Fixture {
        model,
        areas,
        annotations: None,
    }
}

pub const SMS_AREA: &str = "SMSChannel";

fn add_sms(mut b: ModelBuilder, areas: &mut AreaMap) -> ModelBuilder {
    let tables = ["CTS", "STS", "CMS", "RCS", "RLS", "RTS"];
    assign_all(areas, SMS_AREA, &tables);
    b = b.tables(tables);
    let ops = [
        ("SMSobtSus", &["CTS", "STS"][..]),
        ("SMSregMsg", &["CMS"]),
        ("SMSobtRgl", &["RCS", "RLS"]),
        ("SMSregRsp", &["RTS"]),
    ];
    for (i, (f, tables)) in ops.iter().enumerate() {
        let out = format!("sms_data_{}", i + 1);
        b = b.function(f, sig(&["phone_number"], &[&out]));
        for t in *tables {
            b = b.read(f, t);
        }
        // Two facades per operation.
        for j in 1..=2 {
            let fc = format!("SMSrspCnl{}{j}", i + 1);
            b = b
                .facade(&fc, sig(&["phone_number", &out], &["sms_response"]))
                .call(&fc, f);
        }
    }
    b
}

/// Four SMS operations shared by pairs of facades.
pub fn sms() -> Fixture {
    let mut areas = AreaMap::default();
    let model = add_sms(SystemModel::builder(), &mut areas).build();
    Fixture {
        model,
        areas,
        annotations: None,
    }
}

/// All five subsystems in one model: business actions, service charges,
/// checks, SMS and clients.
pub fn banking() -> Fixture {
    let mut areas = AreaMap::default();
    let mut ann = AnnotationSet::new();
    let mut b = SystemModel::builder();
    b = add_business_actions(b, &mut areas, &mut ann);
    b = add_service_charges(b, &mut areas, &mut ann);
    b = add_checks(b, &mut areas);
    b = add_sms(b, &mut areas);
    b = add_clients(b, &mut areas);
    Fixture {
        model: b.build(),
        areas,
        annotations: Some(ann),
    }
}

/// Business actions with the second authorization facade's call renumbered
/// from 1 to 2, leaving a gap. Fails validation.
pub fn ordinal_gap() -> Fixture {
    let mut fx = business_actions();
    for call in &mut fx.model.call_edges {
        if call.caller == "AUTPOSrspIdePosTpgCmgQlq" {
            call.ordinal = 2;
        }
    }
    fx
}

/// Area columns of the mapping fragment; `CNT`, `RCC` and `LAN` appear under
/// both account areas.
pub const TABLE_AREAS: [(&str, &[&str]); 10] = [
    ("BusinessActions", &["ACO", "ACB", "RCA"]),
    ("ServiceCharges", &["AGT", "ISE", "PTC", "PTF", "RTE", "RTT", "TPT", "TTE", "UTM", "DUT"]),
    ("Checks", &["CHS", "TCE", "ECH", "HET", "CCF"]),
    ("Clients", &["CLT"]),
    ("CurrentAccounts", &["CNT", "CCT", "RCC", "LAN", "CCO", "CCE", "CHE"]),
    ("SavingAccounts", &["CNT", "CPO", "LAN", "RCC", "MPO", "PPO", "SPA"]),
    ("SocialBenefits", &["BEN", "DPB", "DBC", "IBS", "LBE"]),
    ("PreApprovedCredit", &["LPA"]),
    ("Cards", &["CMG", "INP", "NPP", "BIN", "CCM", "PBE"]),
    ("SMSChannel", &["CTS", "STS", "CMS", "RCS", "RLS", "RTS"]),
];

/// One facade and one reader function per area over the full mapping.
pub fn table_mapping() -> Fixture {
    let mut areas = AreaMap::default();
    let mut b = SystemModel::builder();
    let mut seen = std::collections::BTreeSet::new();
    for (area, tables) in TABLE_AREAS {
        let f = format!("{area}Read");
        let fc = format!("{area}Query");
        b = b
            .function(&f, sig(&["key"], &["rows"]))
            .facade(&fc, sig(&["key", "rows"], &["reply"]))
            .call(&fc, &f);
        for t in tables {
            areas.assign(t, area);
            if seen.insert(*t) {
                b = b.table(t);
            }
            b = b.read(&f, t);
        }
    }
    Fixture {
        model: b.build(),
        areas,
        annotations: None,
    }
}

/// Sizes for [`synthetic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleSpec {
    pub facades: usize,
    pub functions: usize,
    pub tables: usize,
    pub calls: usize,
    pub accesses: usize,
    pub areas: usize,
    pub control_tables: usize,
}

/// The size of the banking system the technique was evaluated on.
pub const BANKING_SCALE: ScaleSpec = ScaleSpec {
    facades: 613,
    functions: 1131,
    tables: 198,
    calls: 5178,
    accesses: 2030,
    areas: 23,
    control_tables: 6,
};

const LAYERS: usize = 3;
const ITEMS_PER_AREA: usize = 12;

/// Seeded, layered synthetic system with exactly the requested counts.
///
/// Functions of each area form three layers; facades call into the top two,
/// most calls go one or more layers down inside the area, a few cross areas
/// and a few point back up (creating cycles). Bottom-layer functions hold
/// most table accesses. Every business table belongs to exactly one area.
///
/// Panics if the requested edge counts cannot fit the vertex counts.
pub fn synthetic(size: &ScaleSpec, seed: u64) -> Fixture {
    assert!(size.areas > 0 && size.functions >= size.areas * LAYERS);
    assert!(size.tables > size.control_tables);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let area_of = |i: usize| i % size.areas;
    let layer_of = |i: usize| (i / size.areas) % LAYERS;

    let function = |i: usize| format!("F{i:04}");
    let facade = |j: usize| format!("C{j:04}");
    let table = |t: usize| format!("T{t:03}");
    let item = |area: usize, k: usize| format!("a{area:02}_d{k:02}");

    let mut by_area_layer = vec![vec![Vec::new(); LAYERS]; size.areas];
    for i in 0..size.functions {
        by_area_layer[area_of(i)][layer_of(i)].push(i);
    }
    let mut area_tables = vec![Vec::new(); size.areas];
    for t in size.control_tables..size.tables {
        area_tables[(t - size.control_tables) % size.areas].push(t);
    }

    let mut areas = AreaMap::default();
    let mut b = SystemModel::builder();
    for t in 0..size.tables {
        b = b.table(&table(t));
        if t < size.control_tables {
            areas.assign(&table(t), CONTROL_AREA);
        } else {
            areas.assign(&table(t), &format!("Area{:02}", (t - size.control_tables) % size.areas));
        }
    }
    let random_sig = |area: usize, n_in: usize, n_out: usize, rng: &mut ChaCha8Rng| {
        let mut pool: Vec<usize> = (0..ITEMS_PER_AREA).collect();
        pool.shuffle(rng);
        IoSignature::new(
            pool[..n_in].iter().map(|&k| item(area, k)),
            pool[n_in..n_in + n_out].iter().map(|&k| item(area, k)),
        )
    };
    for i in 0..size.functions {
        let s = random_sig(area_of(i), 2, 1, &mut rng);
        b = b.function(&function(i), s);
    }
    for j in 0..size.facades {
        let s = random_sig(area_of(j), 3, 1, &mut rng);
        b = b.facade(&facade(j), s);
    }

    // Facade calls: an even share of the call budget, into the top layers.
    let mut seen = std::collections::HashSet::new();
    let facade_calls = (size.calls / 2).min(size.facades * 4);
    let mut calls = 0;
    'facades: for round in 0.. {
        for j in 0..size.facades {
            if calls == facade_calls {
                break 'facades;
            }
            let layer = usize::from(round > 1 && rng.gen_bool(0.3));
            let pool = &by_area_layer[area_of(j)][layer];
            let callee = pool[rng.gen_range(0..pool.len())];
            if seen.insert((facade(j), callee)) {
                b = b.call(&facade(j), &function(callee));
                calls += 1;
            }
        }
        assert!(round < 10_000, "facade call budget does not fit");
    }

    // Function calls.
    let mut attempts = 0usize;
    while calls < size.calls {
        attempts += 1;
        assert!(attempts < size.calls * 1000, "call budget does not fit");
        let area = rng.gen_range(0..size.areas);
        let roll: f64 = rng.gen();
        let (caller, callee) = if roll < 0.02 {
            // Back edge: bottom layer calls up.
            let from = &by_area_layer[area][LAYERS - 1];
            let to = &by_area_layer[area][rng.gen_range(0..LAYERS - 1)];
            (from[rng.gen_range(0..from.len())], to[rng.gen_range(0..to.len())])
        } else {
            let layer = rng.gen_range(0..LAYERS - 1);
            let from = &by_area_layer[area][layer];
            let target_area = if roll < 0.08 { rng.gen_range(0..size.areas) } else { area };
            let to = &by_area_layer[target_area][rng.gen_range(layer + 1..LAYERS)];
            (from[rng.gen_range(0..from.len())], to[rng.gen_range(0..to.len())])
        };
        if caller != callee && seen.insert((function(caller), callee)) {
            b = b.call(&function(caller), &function(callee));
            calls += 1;
        }
    }

    // Accesses: every business table is touched once by its area's bottom
    // layer, then the rest at random.
    let mut touched = std::collections::HashSet::new();
    for (area, tables) in area_tables.iter().enumerate() {
        for &t in tables {
            let pool = &by_area_layer[area][LAYERS - 1];
            let f = pool[rng.gen_range(0..pool.len())];
            touched.insert((f, t, false));
            b = b.read(&function(f), &table(t));
        }
    }
    let mut attempts = 0usize;
    while touched.len() < size.accesses {
        attempts += 1;
        assert!(attempts < size.accesses * 1000, "access budget does not fit");
        let area = rng.gen_range(0..size.areas);
        let layer = if rng.gen_bool(0.8) { LAYERS - 1 } else { LAYERS - 2 };
        let pool = &by_area_layer[area][layer];
        let f = pool[rng.gen_range(0..pool.len())];
        let (t, write, txn) = if size.control_tables > 0 && rng.gen_bool(0.05) {
            (rng.gen_range(0..size.control_tables), true, None)
        } else {
            let tables = &area_tables[area];
            let write = rng.gen_bool(0.3);
            let txn = write.then(|| format!("tx{area:02}_{}", rng.gen_range(0..3)));
            (tables[rng.gen_range(0..tables.len())], write, txn)
        };
        if !touched.insert((f, t, write)) {
            continue;
        }
        b = if write {
            b.write(&function(f), &table(t), txn.as_deref())
        } else {
            b.read(&function(f), &table(t))
        };
    }
    Fixture {
        model: b.build(),
        areas,
        annotations: None,
    }
}
