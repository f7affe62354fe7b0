# contact_pi1 package
