"""Seeded campaigns, the same ones the mmm command runs."""

from mmm import campaigns
from mmm.campaigns import CampaignConfig

rep = campaigns.run(CampaignConfig("rank", m=3, n=4, r=2, samples=5, seed=7, method="both"))
print(rep["summary"])
print(campaigns.to_csv(rep).splitlines()[0])

rep = campaigns.run(CampaignConfig("gram", samples=5, seed=1))
for s in rep["samples"][:4]:
    print(s["family"], s["spec"], f"{s['gram_residual']:.1e} {s['inverse_residual']:.1e}")

rep = campaigns.run(CampaignConfig("dims"))
print(f"dimension sweep: {rep['summary']['passed']}/{rep['summary']['samples']} rows agree")

# a report is a pure function of the config, apart from wall time
a = campaigns.strip_timing(campaigns.run(CampaignConfig("sym", pattern="2,1", samples=3, seed=4)))
b = campaigns.strip_timing(campaigns.run(CampaignConfig("sym", pattern="2,1", samples=3, seed=4)))
print("reproducible:", campaigns.dumps(a) == campaigns.dumps(b))
